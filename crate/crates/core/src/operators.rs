//! Sparse operators over a fixed-excitation basis: the lattice Hamiltonian,
//! its building blocks, correlators, the translation permutation and the
//! non-Hermitian loss diagonal.
//!
//! Energies are measured in a frame where the qubit splitting `omega_z` is the
//! reference (default zero), so the cavity sits at `omega_z + delta`. Within a
//! sector of `N` excitations any other choice of reference only adds a
//! constant multiple of `N`.

use std::io::{self, Write};
use std::ops::Mul;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::basis::{BasisTable, SiteState};
use crate::linalg::{LinearOperator, Scalar};

/// Physical parameters of the lattice, in units of the reference coupling.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct LatticeParams {
    /// Light-matter coupling `g`.
    pub coupling: f64,
    /// Photon hopping rate `J`.
    pub hopping: f64,
    /// Detuning `delta = omega_c - omega_z`.
    pub detuning: f64,
    /// Qubit splitting `omega_z`; sets the zero of energy.
    pub qubit_splitting: f64,
    /// Cavity decay rate `kappa`.
    pub cavity_decay: f64,
    /// Qubit decay rate `gamma`.
    pub qubit_decay: f64,
}

impl LatticeParams {
    pub fn new(coupling: f64, hopping: f64, detuning: f64) -> Self {
        LatticeParams { coupling, hopping, detuning, ..Default::default() }
    }

    pub fn cavity_frequency(&self) -> f64 {
        self.qubit_splitting + self.detuning
    }

    pub fn with_decay(mut self, cavity_decay: f64, qubit_decay: f64) -> Self {
        self.cavity_decay = cavity_decay;
        self.qubit_decay = qubit_decay;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Structure {
    RealSymmetric,
    General,
    Diagonal,
}

/// How the qubit loss term `-i (gamma/2) sum_j sigma_z` is read.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum DissipationConvention {
    /// `sigma_z` exactly as written: `-1` for down, `+1` for up.
    #[default]
    LiteralSigmaZ,
    /// `(sigma_z + 1)/2`: only excited qubits decay.
    NumberConserving,
}

impl DissipationConvention {
    /// Qubit weight entering the loss diagonal for a row with `up` excited
    /// qubits out of `sites`.
    #[inline]
    pub fn qubit_weight(self, up: usize, sites: usize) -> f64 {
        match self {
            DissipationConvention::LiteralSigmaZ => 2.0 * up as f64 - sites as f64,
            DissipationConvention::NumberConserving => up as f64,
        }
    }
}

/// Compressed-row sparse matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseOperator<T = f64> {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<T>,
    structure: Structure,
}

impl<T: Scalar> SparseOperator<T> {
    pub fn zero(dim: usize, structure: Structure) -> Self {
        SparseOperator {
            dim,
            row_ptr: vec![0; dim + 1],
            cols: Vec::new(),
            values: Vec::new(),
            structure,
        }
    }

    /// Coordinate assembly: entries are sorted and duplicates summed in
    /// insertion order. Explicit zeros are dropped.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, T)>, structure: Structure) -> Self {
        // Stable sort keeps duplicate summation order deterministic.
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut values: Vec<T> = Vec::with_capacity(triplets.len());
        let mut rows = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            assert!(r < dim && c < dim, "entry ({r}, {c}) outside dimension {dim}");
            if let (Some(&lr), Some(&lc)) = (rows.last(), cols.last()) {
                if lr == r && lc == c {
                    let last = values.last_mut().unwrap();
                    *last += v;
                    continue;
                }
            }
            rows.push(r);
            cols.push(c);
            values.push(v);
        }
        let mut keep_rows = Vec::with_capacity(rows.len());
        let mut keep_cols = Vec::with_capacity(rows.len());
        let mut keep_vals = Vec::with_capacity(rows.len());
        for ((r, c), v) in rows.into_iter().zip(cols).zip(values) {
            if v != T::zero() {
                keep_rows.push(r);
                keep_cols.push(c);
                keep_vals.push(v);
            }
        }
        for &r in &keep_rows {
            row_ptr[r + 1] += 1;
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        SparseOperator { dim, row_ptr, cols: keep_cols, values: keep_vals, structure }
    }

    pub fn from_diagonal(diag: Vec<T>) -> Self {
        let dim = diag.len();
        let triplets = diag.into_iter().enumerate().map(|(i, v)| (i, i, v)).collect();
        SparseOperator::from_triplets(dim, triplets, Structure::Diagonal)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn structure(&self) -> Structure {
        self.structure
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.dim).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[span.clone()].binary_search(&c) {
            Ok(k) => self.values[span.start + k],
            Err(_) => T::zero(),
        }
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    /// `y = A x` for any vector scalar the entries can multiply into.
    pub fn apply_to<X>(&self, x: &[X], y: &mut [X])
    where
        X: Scalar + Mul<T, Output = X>,
    {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        for (r, yr) in y.iter_mut().enumerate() {
            let mut acc = X::zero();
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += x[self.cols[k]] * self.values[k];
            }
            *yr = acc;
        }
    }

    pub fn mul_vec<X>(&self, x: &[X]) -> Vec<X>
    where
        X: Scalar + Mul<T, Output = X>,
    {
        let mut y = vec![X::zero(); self.dim];
        self.apply_to(x, &mut y);
        y
    }

    /// Exact structural symmetry: every stored `(r, c, v)` has a stored
    /// `(c, r, v)` with bit-identical value.
    pub fn is_exactly_symmetric(&self) -> bool {
        self.entries().all(|(r, c, v)| self.get(c, r) == v)
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        let mut out = self.clone();
        for v in out.values.iter_mut() {
            *v = *v * alpha;
        }
        out
    }

    /// `sum_k alpha_k A_k` over operators of equal dimension.
    pub fn linear_combination(terms: &[(f64, &SparseOperator<T>)]) -> Self {
        let dim = terms.first().map_or(0, |(_, op)| op.dim);
        let mut structure = Structure::Diagonal;
        let mut triplets = Vec::new();
        for &(alpha, op) in terms {
            assert_eq!(op.dim, dim, "dimension mismatch in linear combination");
            structure = merge_structure(structure, op.structure);
            if alpha != 0.0 {
                triplets.extend(op.entries().map(|(r, c, v)| (r, c, v * alpha)));
            }
        }
        SparseOperator::from_triplets(dim, triplets, structure)
    }

    /// Writes `row col value` lines.
    pub fn write_coo<W: Write>(&self, mut out: W) -> io::Result<()>
    where
        T: FormatEntry,
    {
        writeln!(out, "# dim={} nnz={}", self.dim, self.nnz())?;
        for (r, c, v) in self.entries() {
            writeln!(out, "{r} {c} {}", v.format_entry())?;
        }
        Ok(())
    }
}

impl SparseOperator<f64> {
    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.entries() {
            m[(r, c)] = v;
        }
        m
    }

    pub fn to_complex(&self) -> SparseOperator<Complex64> {
        SparseOperator {
            dim: self.dim,
            row_ptr: self.row_ptr.clone(),
            cols: self.cols.clone(),
            values: self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
            structure: self.structure,
        }
    }

    /// `<x| A |x>` for a real or complex vector.
    pub fn expectation<X>(&self, x: &[X]) -> X
    where
        X: Scalar + Mul<f64, Output = X>,
    {
        let y = self.mul_vec(x);
        crate::linalg::dot(x, &y)
    }

    /// Largest absolute row sum, an upper bound on the spectral radius.
    pub fn max_row_sum(&self) -> f64 {
        (0..self.dim)
            .map(|r| self.row(r).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

impl LinearOperator for SparseOperator<f64> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.apply_to(x, y)
    }
}

fn merge_structure(a: Structure, b: Structure) -> Structure {
    use Structure::*;
    match (a, b) {
        (General, _) | (_, General) => General,
        (RealSymmetric, _) | (_, RealSymmetric) => RealSymmetric,
        (Diagonal, Diagonal) => Diagonal,
    }
}

pub trait FormatEntry {
    fn format_entry(&self) -> String;
}

impl FormatEntry for f64 {
    fn format_entry(&self) -> String {
        format!("{self:.16e}")
    }
}

impl FormatEntry for Complex64 {
    fn format_entry(&self) -> String {
        format!("{:.16e} {:.16e}", self.re, self.im)
    }
}

// ---------------------------------------------------------------------------
// Builders

fn lookup(table: &BasisTable, config: &[SiteState]) -> usize {
    table
        .find(config)
        .expect("excitation-conserving move produced a configuration outside the sector")
}

/// `sum_j a_j^dag a_j` as a diagonal.
pub fn build_photon_number(table: &BasisTable) -> SparseOperator {
    SparseOperator::from_diagonal((0..table.dim()).map(|i| table.photon_count(i) as f64).collect())
}

/// `sum_j (sigma_jz + 1)/2` as a diagonal.
pub fn build_qubit_number(table: &BasisTable) -> SparseOperator {
    SparseOperator::from_diagonal((0..table.dim()).map(|i| table.qubit_count(i) as f64).collect())
}

/// `sum_j (a_j^dag sigma_j- + sigma_j+ a_j)`.
pub fn build_coupling(table: &BasisTable) -> SparseOperator {
    let mut triplets = Vec::new();
    let mut work = Vec::with_capacity(table.num_sites());
    for (i, row) in table.states().enumerate() {
        for j in 0..row.len() {
            let site = row[j];
            if site.qubit == crate::basis::Qubit::Up {
                // a^dag sigma-: (n, up) -> (n + 1, down), amplitude sqrt(n + 1)
                work.clear();
                work.extend_from_slice(row);
                work[j] = SiteState::down(site.photons + 1);
                let k = lookup(table, &work);
                let amp = ((site.photons + 1) as f64).sqrt();
                triplets.push((k, i, amp));
                triplets.push((i, k, amp));
            }
        }
    }
    SparseOperator::from_triplets(table.dim(), triplets, Structure::RealSymmetric)
}

/// Periodic bonds `(j, j + 1 mod L)`. One site has no bond; two sites have
/// the same pair listed twice.
pub fn bonds(sites: usize) -> Vec<(usize, usize)> {
    if sites < 2 {
        return Vec::new();
    }
    (0..sites).map(|j| (j, (j + 1) % sites)).collect()
}

/// `sum_j (a_j^dag a_{j+1} + a_{j+1}^dag a_j)` without the `-J` prefactor.
pub fn build_hopping(table: &BasisTable) -> SparseOperator {
    let mut triplets = Vec::new();
    let mut work = Vec::with_capacity(table.num_sites());
    let bonds = bonds(table.num_sites());
    for (i, row) in table.states().enumerate() {
        for &(a, b) in &bonds {
            // a_a^dag a_b, the mirrored insertion supplies the conjugate term.
            let from = row[b];
            if from.photons == 0 {
                continue;
            }
            let to = row[a];
            work.clear();
            work.extend_from_slice(row);
            work[b].photons -= 1;
            work[a].photons += 1;
            let k = lookup(table, &work);
            let amp = (from.photons as f64).sqrt() * ((to.photons + 1) as f64).sqrt();
            triplets.push((k, i, amp));
            triplets.push((i, k, amp));
        }
    }
    SparseOperator::from_triplets(table.dim(), triplets, Structure::RealSymmetric)
}

/// Uncoupled JC sites: `omega_c sum n + omega_z sum (sz+1)/2 + g sum (a^dag s- + s+ a)`.
pub fn build_h0(table: &BasisTable, params: &LatticeParams) -> SparseOperator {
    let omega_c = params.cavity_frequency();
    let omega_z = params.qubit_splitting;
    let diag = build_diagonal(table, omega_c, omega_z);
    SparseOperator::linear_combination(&[(1.0, &diag), (params.coupling, &build_coupling(table))])
}

fn build_diagonal(table: &BasisTable, omega_c: f64, omega_z: f64) -> SparseOperator {
    let diag = (0..table.dim())
        .map(|i| omega_c * table.photon_count(i) as f64 + omega_z * table.qubit_count(i) as f64)
        .collect();
    let mut op = SparseOperator::from_diagonal(diag);
    op.structure = Structure::RealSymmetric;
    op
}

/// `H_0 - J * hopping`.
pub fn build_hamiltonian(table: &BasisTable, params: &LatticeParams) -> SparseOperator {
    let h0 = build_h0(table, params);
    SparseOperator::linear_combination(&[(1.0, &h0), (-params.hopping, &build_hopping(table))])
}

/// `a_i^dag a_j` for 0-based sites `i`, `j`.
pub fn build_correlator(table: &BasisTable, i: usize, j: usize) -> SparseOperator {
    let l = table.num_sites();
    assert!(i < l && j < l, "site index out of range");
    let mut triplets = Vec::new();
    let mut work = Vec::with_capacity(l);
    for (r, row) in table.states().enumerate() {
        if i == j {
            triplets.push((r, r, row[i].photons as f64));
            continue;
        }
        if row[j].photons == 0 {
            continue;
        }
        work.clear();
        work.extend_from_slice(row);
        work[j].photons -= 1;
        work[i].photons += 1;
        let k = lookup(table, &work);
        let amp = (row[j].photons as f64).sqrt() * ((row[i].photons + 1) as f64).sqrt();
        triplets.push((k, r, amp));
    }
    let structure = if i == j { Structure::Diagonal } else { Structure::General };
    SparseOperator::from_triplets(table.dim(), triplets, structure)
}

/// Permutation representation of a one-site cyclic shift.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Translation {
    sites: usize,
    // perm[i] = ordinal of translate(state(i), 1)
    perm: Vec<usize>,
}

impl Translation {
    pub fn new(table: &BasisTable) -> Self {
        let perm = table
            .states()
            .map(|row| lookup(table, &crate::basis::translate_config(row, 1)))
            .collect();
        Translation { sites: table.num_sites(), perm }
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn image(&self, i: usize) -> usize {
        self.perm[i]
    }

    /// `y = T x`
    pub fn apply<T: Scalar>(&self, x: &[T], y: &mut [T]) {
        for (i, &p) in self.perm.iter().enumerate() {
            y[p] = x[i];
        }
    }

    /// Projection onto the translation-invariant sector,
    /// `P0 = (1/L) sum_m T^m`.
    pub fn project<T: Scalar>(&self, x: &[T]) -> Vec<T> {
        let mut acc = x.to_vec();
        let mut cur = x.to_vec();
        let mut next = vec![T::zero(); x.len()];
        for _ in 1..self.sites {
            self.apply(&cur, &mut next);
            std::mem::swap(&mut cur, &mut next);
            for (a, &c) in acc.iter_mut().zip(&cur) {
                *a += c;
            }
        }
        let inv = 1.0 / self.sites as f64;
        for a in acc.iter_mut() {
            *a = *a * inv;
        }
        acc
    }

    /// `||P0 x||^2`.
    pub fn symmetric_weight<T: Scalar>(&self, x: &[T]) -> f64 {
        crate::linalg::norm_sqr(&self.project(x))
    }

    pub fn to_operator(&self) -> SparseOperator {
        let triplets = self.perm.iter().enumerate().map(|(i, &p)| (p, i, 1.0)).collect();
        SparseOperator::from_triplets(self.perm.len(), triplets, Structure::General)
    }

    /// `max |[A, T]|` over entries, exploiting that `T` is a permutation.
    pub fn commutator_max_norm(&self, op: &SparseOperator) -> f64 {
        // (T A T^-1)[p(r), p(c)] = A[r, c]
        let mut worst = 0.0f64;
        for (r, c, v) in op.entries() {
            let moved = op.get(self.perm[r], self.perm[c]);
            worst = worst.max((moved - v).abs());
        }
        // entries of A at images that are absent at the preimage
        let mut inverse = vec![0usize; self.perm.len()];
        for (i, &p) in self.perm.iter().enumerate() {
            inverse[p] = i;
        }
        for (r, c, v) in op.entries() {
            let back = op.get(inverse[r], inverse[c]);
            worst = worst.max((back - v).abs());
        }
        worst
    }
}

/// Permutation matrix for the one-site shift.
pub fn build_translation(table: &BasisTable) -> SparseOperator {
    Translation::new(table).to_operator()
}

/// Purely imaginary loss diagonal,
/// `-i (kappa/2) sum n_j - i (gamma/2) sum w_j` with `w_j` per `convention`.
pub fn build_dissipative_diagonal(
    table: &BasisTable,
    kappa: f64,
    gamma: f64,
    convention: DissipationConvention,
) -> SparseOperator<Complex64> {
    let l = table.num_sites();
    let diag = (0..table.dim())
        .map(|i| {
            let photon = table.photon_count(i) as f64;
            let qubit = convention.qubit_weight(table.qubit_count(i), l);
            Complex64::new(0.0, -0.5 * kappa * photon - 0.5 * gamma * qubit)
        })
        .collect();
    SparseOperator::from_diagonal(diag)
}

// ---------------------------------------------------------------------------
// Parameterized Hamiltonian for repeated evaluation along a ramp.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Term {
    Coupling,
    Hopping,
}

/// Pre-assembled structural blocks of `H(g, J, delta)`.
///
/// The coupling and hopping blocks never share an entry, so they are merged
/// into one compressed-row pattern with a per-entry term tag; the diagonal is
/// kept as photon and qubit counts.
#[derive(Clone, Debug)]
pub struct HamiltonianTemplate {
    dim: usize,
    sites: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<f64>,
    terms: Vec<Term>,
    photons: Vec<f64>,
    qubits: Vec<f64>,
    coupling: SparseOperator,
    hopping: SparseOperator,
}

impl HamiltonianTemplate {
    pub fn new(table: &BasisTable) -> Self {
        let coupling = build_coupling(table);
        let hopping = build_hopping(table);
        let dim = table.dim();
        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(coupling.nnz() + hopping.nnz());
        let mut values = Vec::with_capacity(cols.capacity());
        let mut terms = Vec::with_capacity(cols.capacity());
        for r in 0..dim {
            let mut row: Vec<(usize, f64, Term)> = coupling
                .row(r)
                .map(|(c, v)| (c, v, Term::Coupling))
                .chain(hopping.row(r).map(|(c, v)| (c, v, Term::Hopping)))
                .collect();
            row.sort_by_key(|e| e.0);
            for (c, v, t) in row {
                cols.push(c);
                values.push(v);
                terms.push(t);
            }
            row_ptr[r + 1] = cols.len();
        }
        HamiltonianTemplate {
            dim,
            sites: table.num_sites(),
            row_ptr,
            cols,
            values,
            terms,
            photons: (0..dim).map(|i| table.photon_count(i) as f64).collect(),
            qubits: (0..dim).map(|i| table.qubit_count(i) as f64).collect(),
            coupling,
            hopping,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn coupling_block(&self) -> &SparseOperator {
        &self.coupling
    }

    pub fn hopping_block(&self) -> &SparseOperator {
        &self.hopping
    }

    pub fn photon_counts(&self) -> &[f64] {
        &self.photons
    }

    pub fn qubit_counts(&self) -> &[f64] {
        &self.qubits
    }

    /// Real diagonal for `params`.
    pub fn diagonal(&self, params: &LatticeParams) -> Vec<f64> {
        let wc = params.cavity_frequency();
        let wz = params.qubit_splitting;
        self.photons.iter().zip(&self.qubits).map(|(&n, &q)| wc * n + wz * q).collect()
    }

    /// Imaginary parts of the loss diagonal (zero when both rates vanish).
    pub fn loss_diagonal(&self, params: &LatticeParams, convention: DissipationConvention) -> Option<Vec<f64>> {
        if params.cavity_decay == 0.0 && params.qubit_decay == 0.0 {
            return None;
        }
        Some(
            self.photons
                .iter()
                .zip(&self.qubits)
                .map(|(&n, &q)| {
                    let w = convention.qubit_weight(q as usize, self.sites);
                    -0.5 * params.cavity_decay * n - 0.5 * params.qubit_decay * w
                })
                .collect(),
        )
    }

    /// `y = H(params) x` for real or complex vectors; Hermitian part only.
    pub fn apply<X>(&self, params: &LatticeParams, x: &[X], y: &mut [X])
    where
        X: Scalar,
    {
        let wc = params.cavity_frequency();
        let wz = params.qubit_splitting;
        let coef = [params.coupling, -params.hopping];
        for r in 0..self.dim {
            let mut acc = x[r] * (wc * self.photons[r] + wz * self.qubits[r]);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = coef[self.terms[k] as usize];
                acc += x[self.cols[k]] * (c * self.values[k]);
            }
            y[r] = acc;
        }
    }

    /// Assembled sparse matrix for `params`.
    pub fn assemble(&self, params: &LatticeParams) -> SparseOperator {
        let mut diag = SparseOperator::from_diagonal(self.diagonal(params));
        diag.structure = Structure::RealSymmetric;
        SparseOperator::linear_combination(&[
            (1.0, &diag),
            (params.coupling, &self.coupling),
            (-params.hopping, &self.hopping),
        ])
    }

    /// Binds parameters for use with the eigensolvers.
    pub fn bind(&self, params: LatticeParams) -> BoundHamiltonian<'_> {
        BoundHamiltonian { template: self, params }
    }

    /// `<dH/dg>`, `<dH/dJ>`, `<dH/d delta>` in the normalized real state `v`.
    pub fn partials(&self, v: &[f64]) -> HamiltonianPartials {
        let coupling = self.coupling.expectation(v);
        let hopping = -self.hopping.expectation(v);
        let detuning = self.photons.iter().zip(v).map(|(n, x)| n * x * x).sum();
        HamiltonianPartials { coupling, hopping, detuning }
    }
}

/// Ground-state expectations of the parameter derivatives of `H`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HamiltonianPartials {
    /// `I_g = <sum (a^dag s- + s+ a)>`
    pub coupling: f64,
    /// `I_J = -<hopping>`
    pub hopping: f64,
    /// `I_delta = <sum n>`
    pub detuning: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct BoundHamiltonian<'a> {
    pub template: &'a HamiltonianTemplate,
    pub params: LatticeParams,
}

impl LinearOperator for BoundHamiltonian<'_> {
    fn dim(&self) -> usize {
        self.template.dim
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.template.apply(&self.params, x, y)
    }
}

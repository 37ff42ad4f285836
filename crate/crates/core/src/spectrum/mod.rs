//! Ground states, low-lying spectra with translation-symmetry labels, and
//! the minimal symmetric gap along a ramp trajectory.

pub mod lanczos;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use crate::basis::BasisTable;
use crate::error::SpectrumError;
use crate::linalg::{axpy, dot, norm, LinearOperator};
use crate::operators::{build_correlator, HamiltonianTemplate, LatticeParams, Translation};
use crate::ramp::RampPlan;

pub use lanczos::LanczosOptions;

/// Eigenvalue splitting below which two levels count as degenerate, in units of g.
pub const DEGENERACY_THRESHOLD: f64 = 1e-9;
/// A state is symmetric when `||P0 v||^2` exceeds this.
pub const SYMMETRIC_WEIGHT_THRESHOLD: f64 = 0.5;
/// Dense diagonalization is used up to this dimension under `Solver::Auto`.
pub const DENSE_LIMIT: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Solver {
    #[default]
    Auto,
    Dense,
    Lanczos,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenOptions {
    pub solver: Solver,
    pub dense_limit: usize,
    pub lanczos: LanczosOptions,
    pub degeneracy_threshold: f64,
    /// Levels closer than this are grouped into one multiplet before
    /// symmetry classification.
    pub multiplet_tolerance: f64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            solver: Solver::Auto,
            dense_limit: DENSE_LIMIT,
            lanczos: LanczosOptions::default(),
            degeneracy_threshold: DEGENERACY_THRESHOLD,
            multiplet_tolerance: 1e-7,
        }
    }
}

impl EigenOptions {
    fn use_dense(&self, dim: usize) -> bool {
        match self.solver {
            Solver::Dense => true,
            Solver::Lanczos => false,
            Solver::Auto => dim <= self.dense_limit,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenPair {
    pub energy: f64,
    pub vector: Vec<f64>,
    /// `||P0 v||^2`, the weight in the translation-invariant sector.
    pub symmetric_weight: f64,
}

impl EigenPair {
    pub fn is_symmetric(&self) -> bool {
        self.symmetric_weight > SYMMETRIC_WEIGHT_THRESHOLD
    }

    /// `||H v - E v||`.
    pub fn residual<A: LinearOperator + ?Sized>(&self, op: &A) -> f64 {
        let mut hv = vec![0.0; op.dim()];
        op.apply(&self.vector, &mut hv);
        axpy(-self.energy, &self.vector, &mut hv);
        norm(&hv)
    }
}

/// Dense matrix of a linear operator, column by column.
pub fn to_dense<A: LinearOperator + ?Sized>(op: &A) -> DMatrix<f64> {
    let dim = op.dim();
    let mut m = DMatrix::zeros(dim, dim);
    let mut e = vec![0.0; dim];
    let mut col = vec![0.0; dim];
    for j in 0..dim {
        e[j] = 1.0;
        op.apply(&e, &mut col);
        e[j] = 0.0;
        for i in 0..dim {
            m[(i, j)] = col[i];
        }
    }
    // symmetrize away round-off from the operator itself
    let t = m.transpose();
    (m + t) * 0.5
}

/// All eigenpairs by dense diagonalization, ascending.
pub fn dense_eigenpairs<A: LinearOperator + ?Sized>(op: &A) -> Vec<(f64, Vec<f64>)> {
    let eig = SymmetricEigen::new(to_dense(op));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    order
        .into_iter()
        .map(|k| (eig.eigenvalues[k], eig.eigenvectors.column(k).iter().copied().collect()))
        .collect()
}

/// `||P0 v||^2` with `P0 = (1/L) sum_m T^m`.
pub fn symmetric_projector_weight(v: &[f64], translation: &Translation) -> f64 {
    translation.symmetric_weight(v)
}

/// Groups consecutive levels closer than `tol` (chained).
fn multiplets(energies: &[f64], tol: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for k in 1..=energies.len() {
        if k == energies.len() || energies[k] - energies[k - 1] > tol {
            out.push(start..k);
            start = k;
        }
    }
    out
}

/// Rotates each multiplet so `P0` is diagonal inside it, then records the
/// weights. Symmetric members come first within a multiplet.
fn classify(pairs: Vec<(f64, Vec<f64>)>, translation: &Translation, tol: f64) -> Vec<EigenPair> {
    let energies: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let mut out = Vec::with_capacity(pairs.len());
    for range in multiplets(&energies, tol) {
        let group = &pairs[range.clone()];
        if group.len() == 1 {
            let (e, v) = &group[0];
            out.push(EigenPair {
                energy: *e,
                symmetric_weight: translation.symmetric_weight(v),
                vector: v.clone(),
            });
            continue;
        }
        let k = group.len();
        let projected: Vec<Vec<f64>> = group.iter().map(|(_, v)| translation.project(v)).collect();
        let mut m = DMatrix::<f64>::zeros(k, k);
        for a in 0..k {
            for b in 0..k {
                m[(a, b)] = dot(&group[a].1, &projected[b]);
            }
        }
        let m = (&m + m.transpose()) * 0.5;
        let eig = SymmetricEigen::new(m);
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let mean_energy = energies[range.clone()].iter().sum::<f64>() / k as f64;
        for c in order {
            let mut v = vec![0.0; group[0].1.len()];
            for a in 0..k {
                axpy(eig.eigenvectors[(a, c)], &group[a].1, &mut v);
            }
            crate::linalg::normalize(&mut v);
            let w = translation.symmetric_weight(&v);
            out.push(EigenPair { energy: mean_energy, vector: v, symmetric_weight: w });
        }
    }
    out
}

fn lowest_pairs<A: LinearOperator + ?Sized>(
    op: &A,
    count: usize,
    opts: &EigenOptions,
) -> Result<Vec<(f64, Vec<f64>)>, SpectrumError> {
    let dim = op.dim();
    if count > dim {
        return Err(SpectrumError::TooManyStates { requested: count, dim });
    }
    if opts.use_dense(dim) {
        let mut all = dense_eigenpairs(op);
        all.truncate(count);
        Ok(all)
    } else {
        lanczos::lowest(op, count, None, &opts.lanczos)
    }
}

/// Lowest `count` eigenpairs inside the translation-invariant sector.
pub fn lowest_symmetric<A: LinearOperator + ?Sized>(
    op: &A,
    count: usize,
    translation: &Translation,
    opts: &EigenOptions,
) -> Result<Vec<EigenPair>, SpectrumError> {
    let dim = op.dim();
    let pairs = if opts.use_dense(dim) {
        let all = classify(dense_eigenpairs(op), translation, opts.multiplet_tolerance);
        let symmetric: Vec<EigenPair> = all.into_iter().filter(EigenPair::is_symmetric).collect();
        if symmetric.len() < count {
            return Err(SpectrumError::TooManyStates { requested: count, dim: symmetric.len() });
        }
        return Ok(symmetric.into_iter().take(count).collect());
    } else {
        lanczos::lowest(op, count, Some(translation), &opts.lanczos)?
    };
    Ok(pairs
        .into_iter()
        .map(|(energy, vector)| EigenPair {
            energy,
            symmetric_weight: translation.symmetric_weight(&vector),
            vector,
        })
        .collect())
}

fn fix_sign(v: &mut [f64]) {
    let pivot = v
        .iter()
        .copied()
        .max_by(|a, b| a.abs().total_cmp(&b.abs()))
        .unwrap_or(0.0);
    if pivot < 0.0 {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

/// Unique ground state; fails if the two lowest levels are degenerate.
///
/// The returned vector has its largest-magnitude amplitude positive.
pub fn ground_state<A: LinearOperator + ?Sized>(
    op: &A,
    translation: &Translation,
    opts: &EigenOptions,
) -> Result<EigenPair, SpectrumError> {
    let count = op.dim().min(2);
    let mut pairs = lowest_pairs(op, count, opts)?;
    if pairs.len() == 2 && pairs[1].0 - pairs[0].0 < opts.degeneracy_threshold {
        return Err(SpectrumError::Degenerate {
            lower: pairs[0].0,
            upper: pairs[1].0,
            threshold: opts.degeneracy_threshold,
        });
    }
    let (energy, mut vector) = pairs.swap_remove(0);
    fix_sign(&mut vector);
    let symmetric_weight = translation.symmetric_weight(&vector);
    Ok(EigenPair { energy, vector, symmetric_weight })
}

/// Lowest `count` levels with symmetric weights; degenerate multiplets are
/// rotated to diagonalize the projector first.
pub fn low_spectrum<A: LinearOperator + ?Sized>(
    op: &A,
    count: usize,
    translation: &Translation,
    opts: &EigenOptions,
) -> Result<Vec<EigenPair>, SpectrumError> {
    let dim = op.dim();
    if count > dim {
        return Err(SpectrumError::TooManyStates { requested: count, dim });
    }
    // Extend past `count` until the boundary does not split a multiplet.
    let mut extra = 2usize;
    let pairs = loop {
        let want = (count + extra).min(dim);
        let pairs = lowest_pairs(op, want, opts)?;
        let split = want < dim
            && pairs[want - 1].0 - pairs[count - 1].0 <= opts.multiplet_tolerance;
        if !split {
            break pairs;
        }
        extra *= 2;
    };
    let mut labelled = classify(pairs, translation, opts.multiplet_tolerance);
    labelled.truncate(count);
    for pair in labelled.iter_mut() {
        fix_sign(&mut pair.vector);
    }
    Ok(labelled)
}

/// Ground state and lowest symmetric excitation.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricGap {
    pub ground: EigenPair,
    pub excited_energy: f64,
}

impl SymmetricGap {
    pub fn gap(&self) -> f64 {
        self.excited_energy - self.ground.energy
    }
}

pub fn symmetric_gap<A: LinearOperator + ?Sized>(
    op: &A,
    translation: &Translation,
    opts: &EigenOptions,
) -> Result<SymmetricGap, SpectrumError> {
    let mut pairs = lowest_symmetric(op, 2, translation, opts)?;
    let excited_energy = pairs[1].energy;
    let mut ground = pairs.swap_remove(0);
    fix_sign(&mut ground.vector);
    Ok(SymmetricGap { ground, excited_energy })
}

/// Gap between the two lowest levels regardless of symmetry.
pub fn any_gap<A: LinearOperator + ?Sized>(op: &A, opts: &EigenOptions) -> Result<f64, SpectrumError> {
    let pairs = lowest_pairs(op, 2, opts)?;
    Ok(pairs[1].0 - pairs[0].0)
}

/// Normalized single-particle density matrix
/// `<a_i^dag a_j> / <a_i^dag a_i>` for 0-based sites.
pub fn single_particle_density(table: &BasisTable, state: &[f64], i: usize, j: usize) -> f64 {
    let num = build_correlator(table, i, j).expectation(state);
    let den = build_correlator(table, i, i).expectation(state);
    num / den
}

// ---------------------------------------------------------------------------
// Gap scan

/// Position and size of the minimal symmetric gap on a trajectory.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapReport {
    /// Progress of the reference parameter, in `[0, 1]`.
    pub s: f64,
    pub params: LatticeParams,
    pub gap: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapSample {
    pub s: f64,
    pub params: LatticeParams,
    pub symmetric_gap: f64,
    pub any_gap: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GapScan {
    pub samples: Vec<GapSample>,
    pub minimum: GapReport,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapScanOptions {
    /// Coarse points, including both endpoints.
    pub resolution: usize,
    /// Golden-section refinement stops once the bracket is narrower than this.
    pub refine_tol: f64,
    /// Also record the gap to the first excited level of any symmetry.
    pub with_any_gap: bool,
    pub eigen: EigenOptions,
}

impl Default for GapScanOptions {
    fn default() -> Self {
        GapScanOptions {
            resolution: 33,
            refine_tol: 1e-4,
            with_any_gap: false,
            eigen: EigenOptions::default(),
        }
    }
}

pub const MIN_SCAN_RESOLUTION: usize = 16;

/// Coarse scan of the symmetric gap along `plan`, then golden-section
/// refinement around the smallest coarse value. Flat minima resolve to the
/// smallest `s`.
pub fn gap_scan(
    plan: &RampPlan,
    template: &HamiltonianTemplate,
    translation: &Translation,
    opts: &GapScanOptions,
) -> Result<GapScan, SpectrumError> {
    let resolution = opts.resolution.max(MIN_SCAN_RESOLUTION);
    let threshold = 10.0 * opts.eigen.degeneracy_threshold;
    let eval = |s: f64| -> Result<(LatticeParams, f64), SpectrumError> {
        let params = plan.trajectory_point(s)?;
        let gap = symmetric_gap(&template.bind(params), translation, &opts.eigen)?.gap();
        if gap < threshold {
            return Err(SpectrumError::GapClosed { s, gap, threshold });
        }
        Ok((params, gap))
    };

    let samples: Vec<GapSample> = (0..resolution)
        .into_par_iter()
        .map(|k| {
            let s = k as f64 / (resolution - 1) as f64;
            let (params, symmetric_gap) = eval(s)?;
            let any = if opts.with_any_gap {
                Some(any_gap(&template.bind(params), &opts.eigen)?)
            } else {
                None
            };
            Ok(GapSample { s, params, symmetric_gap, any_gap: any })
        })
        .collect::<Result<_, SpectrumError>>()?;

    let mut best = 0usize;
    for (k, sample) in samples.iter().enumerate() {
        if sample.symmetric_gap < samples[best].symmetric_gap {
            best = k;
        }
    }
    let coarse = GapReport {
        s: samples[best].s,
        params: samples[best].params,
        gap: samples[best].symmetric_gap,
    };
    let lo = samples[best.saturating_sub(1)].s;
    let hi = samples[(best + 1).min(resolution - 1)].s;
    let refined = golden_section(lo, hi, opts.refine_tol, |s| eval(s).map(|(_, g)| g))?;
    let (params, gap) = eval(refined)?;
    let minimum = if gap < coarse.gap { GapReport { s: refined, params, gap } } else { coarse };
    Ok(GapScan { samples, minimum })
}

fn golden_section<F>(mut a: f64, mut b: f64, tol: f64, mut f: F) -> Result<f64, SpectrumError>
where
    F: FnMut(f64) -> Result<f64, SpectrumError>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc <= fd { c } else { d })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{enumerate_basis, LatticeShape};
    use crate::operators::build_hamiltonian;
    use crate::ramp::{Parameter, RampSchedule};

    fn setup(l: usize) -> (BasisTable, HamiltonianTemplate, Translation) {
        let table = enumerate_basis(LatticeShape::unit_filling(l)).unwrap();
        let tpl = HamiltonianTemplate::new(&table);
        let tr = Translation::new(&table);
        (table, tpl, tr)
    }

    #[test]
    fn single_site_ground_energy() {
        let table = enumerate_basis(LatticeShape::new(1, 1)).unwrap();
        let tr = Translation::new(&table);
        for (g, delta) in [(1.0, 0.0), (0.7, -1.3), (1.2, 2.0)] {
            let h = build_hamiltonian(&table, &LatticeParams::new(g, 0.0, delta));
            let gs = ground_state(&h, &tr, &EigenOptions::default()).unwrap();
            let chi = (delta * delta + 4.0 * g * g).sqrt();
            assert!((gs.energy - (delta - chi) / 2.0).abs() < 1e-13);
        }
    }

    #[test]
    fn mott_limit_ground_energy() {
        let (_, tpl, tr) = setup(6);
        let gs = ground_state(&tpl.bind(LatticeParams::new(1.0, 0.0, 0.0)), &tr, &EigenOptions::default())
            .unwrap();
        assert!((gs.energy + 6.0).abs() < 1e-10);
        assert!(gs.symmetric_weight > 1.0 - 1e-8);
    }

    #[test]
    fn lanczos_vector_meets_its_residual_estimate() {
        // the decoupled limit has a heavily clustered spectrum
        let (_, tpl, tr) = setup(6);
        let params = LatticeParams::new(1.0, 0.0, 2.0);
        let op = tpl.bind(params);
        let gs = ground_state(&op, &tr, &EigenOptions::default()).unwrap();
        let mut hv = vec![0.0; gs.vector.len()];
        op.apply(&gs.vector, &mut hv);
        axpy(-gs.energy, &gs.vector, &mut hv);
        assert!(norm(&hv) < 1e-10, "residual {:e}", norm(&hv));
    }

    #[test]
    fn dense_and_lanczos_agree() {
        let (_, tpl, tr) = setup(3);
        let op = tpl.bind(LatticeParams::new(1.0, 0.2, -0.3));
        let dense = low_spectrum(&op, 6, &tr, &EigenOptions { solver: Solver::Dense, ..Default::default() })
            .unwrap();
        let iter = low_spectrum(&op, 6, &tr, &EigenOptions { solver: Solver::Lanczos, ..Default::default() })
            .unwrap();
        for (a, b) in dense.iter().zip(&iter) {
            assert!((a.energy - b.energy).abs() < 1e-9, "{} vs {}", a.energy, b.energy);
            assert!((a.symmetric_weight - b.symmetric_weight).abs() < 1e-6);
        }
    }

    #[test]
    fn degenerate_ground_is_reported() {
        // Two decoupled empty... use g = 0, J = 0, delta = 0: everything degenerate.
        let (_, tpl, tr) = setup(2);
        let err = ground_state(&tpl.bind(LatticeParams::new(0.0, 0.0, 0.0)), &tr, &EigenOptions::default())
            .unwrap_err();
        assert!(matches!(err, SpectrumError::Degenerate { .. }));
    }

    #[test]
    fn multiplets_are_split_into_symmetric_and_not() {
        let (_, tpl, tr) = setup(4);
        let op = tpl.bind(LatticeParams::new(1.0, 0.1, 0.0));
        let spec = low_spectrum(&op, 8, &tr, &EigenOptions::default()).unwrap();
        for pair in &spec {
            assert!(pair.symmetric_weight < 1e-8 || pair.symmetric_weight > 1.0 - 1e-8);
            assert!(pair.residual(&op) <= 1e-8 * pair.energy.abs().max(1.0));
        }
        assert!(spec[0].is_symmetric());
    }

    #[test]
    fn symmetric_gap_matches_classified_spectrum() {
        let (_, tpl, tr) = setup(4);
        let op = tpl.bind(LatticeParams::new(1.0, 0.15, 0.0));
        let gap = symmetric_gap(&op, &tr, &EigenOptions { solver: Solver::Lanczos, ..Default::default() })
            .unwrap();
        let spec = low_spectrum(&op, 20, &tr, &EigenOptions::default()).unwrap();
        let first_sym = spec.iter().skip(1).find(|p| p.is_symmetric()).unwrap();
        assert!((gap.gap() - (first_sym.energy - spec[0].energy)).abs() < 1e-9);
    }

    #[test]
    fn constant_trajectory_reports_left_end() {
        let (_, tpl, tr) = setup(3);
        let plan = RampPlan::new(
            RampSchedule::constant(Parameter::Coupling, 1.0),
            RampSchedule::constant(Parameter::Hopping, 0.1),
            RampSchedule::constant(Parameter::Detuning, 0.0),
            1.0,
        )
        .unwrap();
        let scan = gap_scan(&plan, &tpl, &tr, &GapScanOptions::default()).unwrap();
        assert_eq!(scan.minimum.s, 0.0);
        let first = scan.samples[0].symmetric_gap;
        assert!(scan.samples.iter().all(|s| (s.symmetric_gap - first).abs() < 1e-10));
    }

    #[test]
    fn golden_section_finds_parabola_minimum() {
        let x = golden_section(0.0, 1.0, 1e-6, |s| Ok((s - 0.3141).powi(2))).unwrap();
        assert!((x - 0.3141).abs() < 1e-6);
    }
}

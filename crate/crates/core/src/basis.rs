//! Fixed-excitation Fock basis for a periodic Jaynes-Cummings lattice.
//!
//! Every site carries a cavity mode with `n >= 0` photons and a two-level
//! qubit. The lattice Hamiltonian conserves the total excitation number
//! `sum_j (n_j + s_j)`, so all calculations live in one sector of fixed `N`.
//!
//! Rows of a [`BasisTable`] are sorted lexicographically on the flattened
//! tuple `(n_1, s_1, n_2, s_2, ..., n_L, s_L)` with `down < up`. Lookups are
//! binary searches over that order.

use std::fmt;
use std::io::{self, Write};

use crate::error::BasisError;

/// Default limit on the sector dimension.
pub const DEFAULT_DIMENSION_CAP: usize = 200_000;

/// Default limit on the size of the unrestricted product space walked by
/// [`dimension_oracle`].
pub const DEFAULT_ORACLE_CAP: u128 = 50_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Qubit {
    Down = 0,
    Up = 1,
}

impl Qubit {
    #[inline]
    pub fn excitation(self) -> usize {
        self as usize
    }
}

/// Photon number and qubit state of one lattice site.
///
/// Field order matters: the derived `Ord` is the per-site lexicographic key.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SiteState {
    pub photons: u32,
    pub qubit: Qubit,
}

impl SiteState {
    pub const fn new(photons: u32, qubit: Qubit) -> Self {
        SiteState { photons, qubit }
    }

    pub const fn down(photons: u32) -> Self {
        SiteState::new(photons, Qubit::Down)
    }

    pub const fn up(photons: u32) -> Self {
        SiteState::new(photons, Qubit::Up)
    }

    #[inline]
    pub fn excitations(&self) -> usize {
        self.photons as usize + self.qubit.excitation()
    }
}

impl fmt::Display for SiteState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.qubit {
            Qubit::Down => '↓',
            Qubit::Up => '↑',
        };
        write!(f, "({},{})", self.photons, s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LatticeShape {
    pub sites: usize,
    pub excitations: usize,
}

impl LatticeShape {
    pub fn new(sites: usize, excitations: usize) -> Self {
        LatticeShape { sites, excitations }
    }

    /// Unit filling, `N = L`.
    pub fn unit_filling(sites: usize) -> Self {
        LatticeShape::new(sites, sites)
    }

    /// Sector dimension by counting, without enumerating.
    ///
    /// A site holding `e` excitations has one configuration for `e = 0` and
    /// two (`(e, down)`, `(e - 1, up)`) otherwise, so the count is a simple
    /// convolution over sites.
    pub fn predicted_dimension(&self) -> u128 {
        let n = self.excitations;
        let mut ways = vec![0u128; n + 1];
        ways[0] = 1;
        for _ in 0..self.sites {
            let mut next = vec![0u128; n + 1];
            for (used, &w) in ways.iter().enumerate() {
                if w == 0 {
                    continue;
                }
                for e in 0..=(n - used) {
                    let per_site = if e == 0 { 1 } else { 2 };
                    next[used + e] = next[used + e].saturating_add(w * per_site);
                }
            }
            ways = next;
        }
        ways[n]
    }
}

/// Ordered enumeration of every configuration in one excitation sector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisTable {
    shape: LatticeShape,
    // Row-major, `shape.sites` entries per row.
    sites: Vec<SiteState>,
}

impl BasisTable {
    pub fn shape(&self) -> LatticeShape {
        self.shape
    }

    pub fn num_sites(&self) -> usize {
        self.shape.sites
    }

    pub fn excitations(&self) -> usize {
        self.shape.excitations
    }

    pub fn dim(&self) -> usize {
        self.sites.len() / self.shape.sites
    }

    /// Configuration at ordinal `i`.
    pub fn state(&self, i: usize) -> &[SiteState] {
        let l = self.shape.sites;
        &self.sites[i * l..(i + 1) * l]
    }

    pub fn states(&self) -> impl ExactSizeIterator<Item = &[SiteState]> + '_ {
        self.sites.chunks_exact(self.shape.sites)
    }

    /// Ordinal of `config`, or an error if it lies outside this sector.
    pub fn index_of(&self, config: &[SiteState]) -> Result<usize, BasisError> {
        if config.len() != self.shape.sites {
            return Err(BasisError::WrongLength {
                expected: self.shape.sites,
                found: config.len(),
            });
        }
        let total: usize = config.iter().map(SiteState::excitations).sum();
        if total != self.shape.excitations {
            return Err(BasisError::NotInSector {
                expected: self.shape.excitations,
                found: total,
            });
        }
        self.find(config).ok_or(BasisError::NotInSector {
            expected: self.shape.excitations,
            found: total,
        })
    }

    /// Ordinal lookup without validation; `None` if absent.
    #[inline]
    pub fn find(&self, config: &[SiteState]) -> Option<usize> {
        let (mut lo, mut hi) = (0usize, self.dim());
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            match self.state(mid).cmp(config) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    /// Total photon number of row `i`.
    pub fn photon_count(&self, i: usize) -> usize {
        self.state(i).iter().map(|s| s.photons as usize).sum()
    }

    /// Number of excited qubits in row `i`.
    pub fn qubit_count(&self, i: usize) -> usize {
        self.state(i).iter().map(|s| s.qubit.excitation()).sum()
    }

    /// Writes the table as text: a `# L=.. N=.. dim=..` header, then one
    /// configuration per line as `n_1 s_1 n_2 s_2 ...`.
    pub fn write_text<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(
            out,
            "# L={} N={} dim={}",
            self.shape.sites,
            self.shape.excitations,
            self.dim()
        )?;
        let mut line = String::new();
        for row in self.states() {
            line.clear();
            for (k, site) in row.iter().enumerate() {
                if k > 0 {
                    line.push(' ');
                }
                line.push_str(&format!("{} {}", site.photons, site.qubit.excitation()));
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }
}

/// Enumerates the sector with the default dimension cap.
pub fn enumerate_basis(shape: LatticeShape) -> Result<BasisTable, BasisError> {
    enumerate_basis_capped(shape, DEFAULT_DIMENSION_CAP)
}

pub fn enumerate_basis_capped(shape: LatticeShape, cap: usize) -> Result<BasisTable, BasisError> {
    if shape.sites == 0 {
        return Err(BasisError::EmptyLattice);
    }
    let predicted = shape.predicted_dimension();
    if predicted > cap as u128 {
        return Err(BasisError::DimensionCap { predicted, cap: cap as u128 });
    }
    let mut sites = Vec::with_capacity(predicted as usize * shape.sites);
    let mut current = vec![SiteState::down(0); shape.sites];
    fill(&mut current, 0, shape.excitations, &mut sites);
    Ok(BasisTable { shape, sites })
}

// Depth-first over sites; the (photons asc, down before up) loop order at
// each site yields rows already in lexicographic order.
fn fill(current: &mut [SiteState], site: usize, remaining: usize, out: &mut Vec<SiteState>) {
    let last = site + 1 == current.len();
    for photons in 0..=remaining {
        for qubit in [Qubit::Down, Qubit::Up] {
            let used = photons + qubit.excitation();
            if used > remaining || (last && used != remaining) {
                continue;
            }
            current[site] = SiteState::new(photons as u32, qubit);
            if last {
                out.extend_from_slice(current);
            } else {
                fill(current, site + 1, remaining - used, out);
            }
        }
    }
}

/// Cyclic site shift: site `j` of the result is site `j - shift (mod L)` of
/// the input. Any integer shift is accepted.
pub fn translate_config(config: &[SiteState], shift: isize) -> Vec<SiteState> {
    let l = config.len();
    if l == 0 {
        return Vec::new();
    }
    (0..l)
        .map(|j| config[(j as isize - shift).rem_euclid(l as isize) as usize])
        .collect()
}

/// Independent dimension count by exhaustive filtering of the product space
/// with per-site photon cutoff `N`.
pub fn dimension_oracle(shape: LatticeShape) -> Result<usize, BasisError> {
    dimension_oracle_capped(shape, DEFAULT_ORACLE_CAP)
}

pub fn dimension_oracle_capped(shape: LatticeShape, cap: u128) -> Result<usize, BasisError> {
    if shape.sites == 0 {
        return Err(BasisError::EmptyLattice);
    }
    let per_site = 2 * (shape.excitations as u128 + 1);
    let product = per_site
        .checked_pow(shape.sites as u32)
        .unwrap_or(u128::MAX);
    if product > cap {
        return Err(BasisError::DimensionCap { predicted: product, cap });
    }
    let per_site = per_site as usize;
    let mut count = 0usize;
    for code in 0..product as usize {
        let mut rest = code;
        let mut total = 0usize;
        for _ in 0..shape.sites {
            let local = rest % per_site;
            rest /= per_site;
            // local = 2 * photons + qubit
            total += local / 2 + local % 2;
        }
        if total == shape.excitations {
            count += 1;
        }
    }
    Ok(count)
}

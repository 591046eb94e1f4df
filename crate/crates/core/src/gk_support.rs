//! Weight supports of graded `ℂ[L,R]`-modules for `SL₂` and K-type supports
//! with walls for `Sp₂`.
//!
//! An [`Sl2Support`] stores its occupied even weights exactly, as a union of
//! (possibly unbounded) intervals, so tensor products never depend on a
//! window. Windows only enter when rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sl2Kind {
    PhiKd,
    Psi,
    PhiTilde,
    PsiTilde,
    Custom,
}

impl std::str::FromStr for Sl2Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "phi_kd" | "phi" => Ok(Self::PhiKd),
            "psi" => Ok(Self::Psi),
            "phi_tilde" => Ok(Self::PhiTilde),
            "psi_tilde" => Ok(Self::PsiTilde),
            "custom" => Ok(Self::Custom),
            _ => Err(Error::Domain(format!("unknown support kind {s:?}"))),
        }
    }
}

/// Which operator annihilates the graded component at a solid wall:
/// `Right` means `L`, `Left` means `R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SolidWall {
    pub position: i64,
    pub direction: Side,
}

/// Even integers `w` with `lo ≤ w ≤ hi`; `None` is unbounded on that side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeightInterval {
    pub lo: Option<i64>,
    pub hi: Option<i64>,
}

impl WeightInterval {
    pub fn contains(&self, w: i64) -> bool {
        w % 2 == 0 && self.lo.map_or(true, |l| w >= l) && self.hi.map_or(true, |h| w <= h)
    }

    fn add(&self, other: &Self) -> Self {
        let lo = self.lo.zip(other.lo).map(|(a, b)| a + b);
        let hi = self.hi.zip(other.hi).map(|(a, b)| a + b);
        Self { lo, hi }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sl2Support {
    pub kind: Sl2Kind,
    occupied: Vec<WeightInterval>,
    pub solid_wall: Option<SolidWall>,
    pub dashed_wall: Option<i64>,
}

fn lo_key(i: &WeightInterval) -> (bool, i64) {
    (i.lo.is_some(), i.lo.unwrap_or(0))
}

/// Sorts and merges intervals that overlap or touch on the even lattice.
fn normalize(mut v: Vec<WeightInterval>) -> Vec<WeightInterval> {
    v.retain(|i| match (i.lo, i.hi) {
        (Some(l), Some(h)) => l <= h,
        _ => true,
    });
    v.sort_by_key(lo_key);
    let mut out: Vec<WeightInterval> = Vec::with_capacity(v.len());
    for i in v {
        if let Some(last) = out.last_mut() {
            let touches = match (last.hi, i.lo) {
                (None, _) | (_, None) => true,
                (Some(h), Some(l)) => l <= h + 2,
            };
            if touches {
                last.hi = match (last.hi, i.hi) {
                    (Some(a), Some(b)) => Some(a.max(b)),
                    _ => None,
                };
                continue;
            }
        }
        out.push(i);
    }
    out
}

impl Sl2Support {
    /// A custom support; bounds must be even.
    pub fn new(
        occupied: Vec<WeightInterval>,
        solid_wall: Option<SolidWall>,
        dashed_wall: Option<i64>,
    ) -> Result<Self> {
        let odd = |w: Option<i64>| w.is_some_and(|x| x % 2 != 0);
        if occupied.iter().any(|i| odd(i.lo) || odd(i.hi))
            || solid_wall.is_some_and(|w| w.position % 2 != 0)
            || odd(dashed_wall)
        {
            return Err(Error::Domain("support weights must be even".into()));
        }
        Ok(Self {
            kind: Sl2Kind::Custom,
            occupied: normalize(occupied),
            solid_wall,
            dashed_wall,
        })
    }

    /// The support `{w}` of a single graded component, e.g. `(y^0, 0)`.
    pub fn singleton(w: i64) -> Result<Self> {
        Self::new(vec![WeightInterval { lo: Some(w), hi: Some(w) }], None, None)
    }

    pub fn empty() -> Self {
        Self {
            kind: Sl2Kind::Custom,
            occupied: Vec::new(),
            solid_wall: None,
            dashed_wall: None,
        }
    }

    pub fn intervals(&self) -> &[WeightInterval] {
        &self.occupied
    }

    pub fn is_empty(&self) -> bool {
        self.occupied.is_empty()
    }

    pub fn contains(&self, w: i64) -> bool {
        self.occupied.iter().any(|i| i.contains(w))
    }

    /// Lowest occupied weight, `None` if empty or unbounded below.
    pub fn min_weight(&self) -> Option<i64> {
        self.occupied.first().and_then(|i| i.lo)
    }

    pub fn max_weight(&self) -> Option<i64> {
        self.occupied.last().and_then(|i| i.hi)
    }

    /// Occupied weights inside `[lo, hi]`.
    pub fn occupied_in(&self, lo: i64, hi: i64) -> Vec<i64> {
        let start = lo + lo.rem_euclid(2);
        (start..=hi).step_by(2).filter(|&w| self.contains(w)).collect()
    }

    /// Whether the module has a lowest weight. The lowest occupied graded
    /// component is always killed by `L`, so a bounded-below support carries a
    /// rightward wall at its minimum; the empty support qualifies vacuously.
    pub fn has_lowest_weight(&self) -> bool {
        self.is_empty() || self.min_weight().is_some()
    }

    /// Text diagram over `[lo, hi]`: `●` occupied, `○` empty, `|>` a wall
    /// killed by `L`, `<|` one killed by `R`, `:` a dashed wall. Walls are
    /// drawn just left of the component they label.
    pub fn render(&self, lo: i64, hi: i64, focus: Option<i64>) -> String {
        let start = lo + lo.rem_euclid(2);
        let mut marks = String::new();
        let mut dots = String::new();
        let mut labels = String::new();
        for w in (start..=hi).step_by(2) {
            let wall = match self.solid_wall {
                Some(SolidWall { position, direction }) if position == w => match direction {
                    Side::Right => "|>",
                    Side::Left => "<|",
                },
                _ if self.dashed_wall == Some(w) => " :",
                _ => "  ",
            };
            let dot = if self.contains(w) { '●' } else { '○' };
            let _ = write!(marks, " {wall}  ");
            if focus == Some(w) {
                let _ = write!(dots, "  ({dot})");
            } else {
                let _ = write!(dots, "   {dot} ");
            }
            let _ = write!(labels, "{w:>4} ");
        }
        format!("{marks}\n{dots}\n{labels}\n")
    }
}

/// The support of `ℂ[L,R]` applied to one of the four elliptic Fourier terms.
///
/// `d` is only used for [`Sl2Kind::PhiKd`].
pub fn canonical_sl2_support(kind: Sl2Kind, k: i64, d: i64) -> Result<Sl2Support> {
    if k % 2 != 0 {
        return Err(Error::Domain(format!("weight must be even, got {k}")));
    }
    let up = |lo| vec![WeightInterval { lo: Some(lo), hi: None }];
    let down = |hi| vec![WeightInterval { lo: None, hi: Some(hi) }];
    let wall = |position, direction| Some(SolidWall { position, direction });
    let (occupied, solid_wall, dashed_wall) = match kind {
        Sl2Kind::PhiKd => {
            if d < 0 {
                return Err(Error::Domain(format!("depth must be nonnegative, got {d}")));
            }
            (up(k - 2 * d), wall(k - 2 * d, Side::Right), 2 * d - k)
        }
        Sl2Kind::Psi => {
            if k < 0 {
                return Err(Error::Domain(format!("psi needs k >= 0, got {k}")));
            }
            (up(-k), wall(k + 2, Side::Right), -k - 2)
        }
        Sl2Kind::PhiTilde => {
            if k >= 0 {
                return Err(Error::Domain(format!("phi_tilde needs k < 0, got {k}")));
            }
            (down(k), wall(k, Side::Left), -k)
        }
        Sl2Kind::PsiTilde => {
            if k > 0 {
                return Err(Error::Domain(format!("psi_tilde needs k <= 0, got {k}")));
            }
            (down(-k), wall(k - 2, Side::Left), -k + 2)
        }
        Sl2Kind::Custom => {
            return Err(Error::Domain("custom supports have no canonical form".into()))
        }
    };
    Ok(Sl2Support {
        kind,
        occupied,
        solid_wall,
        dashed_wall: Some(dashed_wall),
    })
}

/// Support of the tensor product: Minkowski sum of the occupied sets.
/// Solid walls of the same direction add; dashed walls are dropped.
pub fn tensor_sl2(s1: &Sl2Support, s2: &Sl2Support) -> Sl2Support {
    let mut occ = Vec::with_capacity(s1.occupied.len() * s2.occupied.len());
    for a in &s1.occupied {
        for b in &s2.occupied {
            occ.push(a.add(b));
        }
    }
    let solid_wall = match (s1.solid_wall, s2.solid_wall) {
        (Some(a), Some(b)) if a.direction == b.direction => Some(SolidWall {
            position: a.position + b.position,
            direction: a.direction,
        }),
        _ => None,
    };
    Sl2Support {
        kind: Sl2Kind::Custom,
        occupied: normalize(occ),
        solid_wall,
        dashed_wall: None,
    }
}

/// Highest weight `(a, b)`, `a ≥ b`, of an irreducible U(2) representation,
/// i.e. `det^b ⊗ sym^{a−b}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct KType {
    pub a: i64,
    pub b: i64,
}

impl KType {
    pub fn new(a: i64, b: i64) -> Result<Self> {
        if a < b {
            return Err(Error::Domain(format!("K-type needs a >= b, got ({a},{b})")));
        }
        Ok(Self { a, b })
    }

    pub fn is_scalar(&self) -> bool {
        self.a == self.b
    }

    pub fn dim(&self) -> i64 {
        self.a - self.b + 1
    }

    /// `det^k sym^j` is `(k + j, k)`.
    pub fn from_det_sym(k: i64, j: i64) -> Result<Self> {
        Self::new(k + j, k)
    }
}

/// `(a,b) ⊗ (a′,b′) = ⊕_{0 ≤ j ≤ min(a−b, a′−b′)} (a+a′−j, b+b′+j)`.
pub fn clebsch_gordan(t1: KType, t2: KType) -> Vec<KType> {
    let m = (t1.a - t1.b).min(t2.a - t2.b);
    (0..=m)
        .map(|j| KType {
            a: t1.a + t2.a - j,
            b: t1.b + t2.b + j,
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WallDirection {
    /// every occupied `a ≥ threshold`
    Right,
    /// every occupied `a ≤ threshold`
    Left,
    /// every occupied `b ≥ threshold`
    Up,
    /// every occupied `b ≤ threshold`
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Wall {
    pub direction: WallDirection,
    pub threshold: i64,
}

impl Wall {
    pub fn new(direction: WallDirection, threshold: i64) -> Self {
        Self { direction, threshold }
    }

    pub fn admits(&self, t: KType) -> bool {
        match self.direction {
            WallDirection::Right => t.a >= self.threshold,
            WallDirection::Left => t.a <= self.threshold,
            WallDirection::Up => t.b >= self.threshold,
            WallDirection::Down => t.b <= self.threshold,
        }
    }
}

/// Finite K-type support with multiplicities and declared walls.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct KTypeSupport {
    occupied: BTreeMap<KType, u64>,
    walls: Vec<Wall>,
}

impl KTypeSupport {
    /// Fails if a declared wall is violated by an occupied K-type.
    pub fn new(occupied: BTreeMap<KType, u64>, walls: Vec<Wall>) -> Result<Self> {
        let occupied: BTreeMap<_, _> = occupied.into_iter().filter(|&(_, m)| m > 0).collect();
        for w in &walls {
            if let Some(t) = occupied.keys().find(|t| !w.admits(**t)) {
                return Err(Error::Domain(format!(
                    "K-type ({},{}) violates wall {:?} {}",
                    t.a, t.b, w.direction, w.threshold
                )));
            }
        }
        let mut walls = walls;
        walls.sort();
        walls.dedup();
        Ok(Self { occupied, walls })
    }

    /// Multiplicity-one support on the given K-types.
    pub fn from_types<I: IntoIterator<Item = KType>>(types: I, walls: Vec<Wall>) -> Result<Self> {
        Self::new(types.into_iter().map(|t| (t, 1)).collect(), walls)
    }

    pub fn occupied(&self) -> &BTreeMap<KType, u64> {
        &self.occupied
    }

    pub fn walls(&self) -> &[Wall] {
        &self.walls
    }

    pub fn contains(&self, t: KType) -> bool {
        self.occupied.contains_key(&t)
    }

    pub fn multiplicity(&self, t: KType) -> u64 {
        self.occupied.get(&t).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.occupied.len()
    }

    pub fn is_empty(&self) -> bool {
        self.occupied.is_empty()
    }

    fn wall_of(&self, d: WallDirection) -> Option<i64> {
        let ts = self.walls.iter().filter(|w| w.direction == d).map(|w| w.threshold);
        match d {
            WallDirection::Right | WallDirection::Up => ts.max(),
            WallDirection::Left | WallDirection::Down => ts.min(),
        }
    }

    /// Grid diagram, `b` increasing upwards and `a` to the right, showing
    /// `● ` for occupied and `· ` for unoccupied pairs with `a ≥ b`.
    pub fn render(&self, a_range: (i64, i64), b_range: (i64, i64)) -> String {
        let mut s = String::new();
        for b in (b_range.0..=b_range.1).rev() {
            let _ = write!(s, "{b:>4} ");
            for a in a_range.0..=a_range.1 {
                let c = if a < b {
                    "  "
                } else if self.contains(KType { a, b }) {
                    "● "
                } else {
                    "· "
                };
                s.push_str(c);
            }
            s.push('\n');
        }
        s.push_str("     ");
        for a in a_range.0..=a_range.1 {
            let _ = write!(s, "{:<2}", a.rem_euclid(100) % 10);
        }
        s.push('\n');
        s
    }
}

/// Walls of `s1 ⊗ s2` implied by the Clebsch-Gordan range. With
/// `a″ = a+a′−j`, `b″ = b+b′+j`, `0 ≤ j ≤ min(a−b, a′−b′)`:
///
/// - `a ≥ a₀`, `b′ ≥ b′₀` give `a″ ≥ a + b′ ≥ a₀ + b′₀`;
/// - `a ≤ a₀`, `b′ ≤ b′₀` give `b″ ≤ a + b′ ≤ a₀ + b′₀`;
/// - `b ≥ b₀`, `b′ ≥ b′₀` give `b″ ≥ b₀ + b′₀`;
/// - `a ≤ a₀`, `a′ ≤ a′₀` give `a″ ≤ a₀ + a′₀`;
///
/// together with the mirror images obtained by swapping the factors.
pub fn propagated_walls(s1: &KTypeSupport, s2: &KTypeSupport) -> Vec<Wall> {
    use WallDirection::*;
    let mut out = Vec::new();
    for (x, y) in [(s1, s2), (s2, s1)] {
        if let (Some(a0), Some(b0)) = (x.wall_of(Right), y.wall_of(Up)) {
            out.push(Wall::new(Right, a0 + b0));
        }
        if let (Some(a0), Some(b0)) = (x.wall_of(Left), y.wall_of(Down)) {
            out.push(Wall::new(Down, a0 + b0));
        }
    }
    if let (Some(b0), Some(b1)) = (s1.wall_of(Up), s2.wall_of(Up)) {
        out.push(Wall::new(Up, b0 + b1));
    }
    if let (Some(a0), Some(a1)) = (s1.wall_of(Left), s2.wall_of(Left)) {
        out.push(Wall::new(Left, a0 + a1));
    }
    out.sort();
    out.dedup();
    out
}

/// Union of [`clebsch_gordan`] over all occupied pairs, multiplicities
/// multiplied and summed, with the walls of [`propagated_walls`].
pub fn tensor_ktype_support(s1: &KTypeSupport, s2: &KTypeSupport) -> KTypeSupport {
    let mut occ: BTreeMap<KType, u64> = BTreeMap::new();
    for (&t1, &m1) in &s1.occupied {
        for (&t2, &m2) in &s2.occupied {
            for t in clebsch_gordan(t1, t2) {
                *occ.entry(t).or_default() += m1 * m2;
            }
        }
    }
    let walls = propagated_walls(s1, s2);
    debug_assert!(walls.iter().all(|w| occ.keys().all(|t| w.admits(*t))));
    KTypeSupport { occupied: occ, walls }
}

pub fn contains_scalar_ktype(s: &KTypeSupport) -> bool {
    s.occupied.keys().any(KType::is_scalar)
}

/// `{(k + 2j, k) : 0 ≤ j ≤ j_max}`, the K-types of the module generated by a
/// holomorphic weight-`k` Fourier term, with its walls `a ≥ k` and `b ≥ k`.
pub fn holomorphic_ktype_support(k: i64, j_max: i64) -> Result<KTypeSupport> {
    KTypeSupport::from_types(
        (0..=j_max).map(|j| KType { a: k + 2 * j, b: k }),
        vec![Wall::new(WallDirection::Right, k), Wall::new(WallDirection::Up, k)],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_merges_touching() {
        let v = normalize(vec![
            WeightInterval { lo: Some(4), hi: Some(8) },
            WeightInterval { lo: Some(0), hi: Some(2) },
            WeightInterval { lo: Some(12), hi: None },
        ]);
        assert_eq!(v.len(), 2);
        assert_eq!(v[0], WeightInterval { lo: Some(0), hi: Some(8) });
    }

    #[test]
    fn cg_small() {
        let out = clebsch_gordan(KType { a: 1, b: 0 }, KType { a: 1, b: 0 });
        assert_eq!(out, vec![KType { a: 2, b: 0 }, KType { a: 1, b: 1 }]);
    }
}

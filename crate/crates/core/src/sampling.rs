//! Seeded random data for the property suites: rationals, cone points, domain
//! points and words in `B`.

use rand::Rng;

use crate::exact::{rat, Gauss, Rat};
use crate::siegel::{BWord, ConeDecomposition, Letter, Point, SiegelDomainSpec};

/// `p/q` with `|p| ≤ num_bound`, `1 ≤ q ≤ den_bound`.
pub fn small_rat<R: Rng>(rng: &mut R, num_bound: i64, den_bound: i64) -> Rat {
    rat(rng.gen_range(-num_bound..=num_bound), rng.gen_range(1..=den_bound))
}

pub fn positive_rat<R: Rng>(rng: &mut R, num_bound: i64, den_bound: i64) -> Rat {
    rat(rng.gen_range(1..=num_bound), rng.gen_range(1..=den_bound))
}

pub fn small_gauss<R: Rng>(rng: &mut R, num_bound: i64, den_bound: i64) -> Gauss {
    Gauss::new(small_rat(rng, num_bound, den_bound), small_rat(rng, num_bound, den_bound))
}

/// Random exact decomposition with positive pivots.
pub fn cone_decomposition<R: Rng>(spec: &SiegelDomainSpec, rng: &mut R) -> ConeDecomposition<Gauss> {
    let pivots = (0..spec.rank()).map(|_| Gauss::real(positive_rat(rng, 9, 4))).collect();
    let lower = (0..spec.rank())
        .map(|k| {
            let count = spec.lower_gens.iter().filter(|g| g.k == k).count();
            (0..count).map(|_| Gauss::real(small_rat(rng, 6, 3))).collect()
        })
        .collect();
    ConeDecomposition { pivots, lower }
}

/// A point of `Ω` with exact coordinates.
pub fn cone_point<R: Rng>(spec: &SiegelDomainSpec, rng: &mut R) -> Vec<Gauss> {
    spec.replay(&cone_decomposition(spec, rng))
}

/// `(X + i(Y + Q(V, V)), V)` with `Y ∈ Ω`, so the point lies in the domain.
pub fn domain_point<R: Rng>(spec: &SiegelDomainSpec, rng: &mut R) -> Point<Gauss> {
    let y = cone_point(spec, rng);
    let v: Vec<Gauss> = (0..spec.n_v()).map(|_| small_gauss(rng, 3, 2)).collect();
    let q = spec.q_form(&v, &v);
    let u = y.iter().zip(&q).map(|(yi, qi)| &Gauss::real(small_rat(rng, 5, 3)) + &(yi + qi).mul_i()).collect();
    Point { u, v }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WordKind {
    /// Every letter type, with float scale parameters.
    Full,
    /// No scale letters, so the action is exact.
    Exact,
    /// Only `B(0)` letters (scale and lower).
    Linear,
}

pub fn letter<R: Rng>(spec: &SiegelDomainSpec, rng: &mut R, kind: WordKind) -> Letter {
    loop {
        let choice = rng.gen_range(0..4);
        let l = match choice {
            0 if kind != WordKind::Linear => {
                Letter::Translate((0..spec.n_u()).map(|_| Gauss::real(small_rat(rng, 4, 3))).collect())
            }
            1 if kind != WordKind::Linear && spec.n_v() > 0 => {
                Letter::Shear((0..spec.n_v()).map(|_| small_gauss(rng, 3, 3)).collect())
            }
            2 if kind != WordKind::Exact => {
                Letter::Scale { k: rng.gen_range(0..spec.rank()), t: rng.gen_range(-1.0..1.0) }
            }
            3 if !spec.lower_gens.is_empty() => {
                Letter::Lower { gen: rng.gen_range(0..spec.lower_gens.len()), s: Gauss::real(small_rat(rng, 4, 3)) }
            }
            _ => continue,
        };
        return l;
    }
}

pub fn word<R: Rng>(spec: &SiegelDomainSpec, rng: &mut R, len: usize, kind: WordKind) -> BWord {
    BWord((0..len).map(|_| letter(spec, rng, kind)).collect())
}

/// Float copy of an exact cone point.
pub fn to_c64(v: &[Gauss]) -> Vec<num_complex::Complex64> {
    v.iter().map(Gauss::to_c64).collect()
}

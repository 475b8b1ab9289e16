//! Brute-force oracles shared by the integration suites.
//!
//! The ring oracle works in the group basis of `(Z/p^M)[C_{p^n}]` with cyclic
//! convolution, converting from the polynomial basis with its own binomial
//! formula. Ideals are enumerated as sets; nothing here touches Howell forms.

#![allow(dead_code)]

use std::collections::HashSet;

use iwasawa_core::layer::omega;
use iwasawa_core::theta::ThetaTower;
use iwasawa_core::{LayerElement, PadicContext, PadicScalar};
use rand::Rng;

pub type Vector = Vec<u64>;

pub struct GroupRingOracle {
    pub p: u64,
    pub modulus: u64,
    pub n: u32,
    pub d: usize,
}

fn binom(n: usize, k: usize) -> i128 {
    let mut r: i128 = 1;
    for i in 0..k {
        r = r * (n - i) as i128 / (i + 1) as i128;
    }
    r
}

impl GroupRingOracle {
    pub fn new(ctx: PadicContext, n: u32) -> Self {
        Self {
            p: ctx.p(),
            modulus: ctx.modulus(),
            n,
            d: (ctx.p() as usize).pow(n),
        }
    }

    fn reduce(&self, v: i128) -> u64 {
        v.rem_euclid(self.modulus as i128) as u64
    }

    /// `Σ c_i X^i` with `X = γ − 1` expanded in powers of `γ`.
    pub fn to_group(&self, e: &LayerElement) -> Vector {
        let c = e.coeffs();
        (0..self.d)
            .map(|k| {
                let s: i128 = (k..self.d)
                    .map(|i| {
                        let sign = if (i - k) % 2 == 0 { 1 } else { -1 };
                        sign * binom(i, k) * c[i] as i128
                    })
                    .sum();
                self.reduce(s)
            })
            .collect()
    }

    pub fn to_poly_coeffs(&self, g: &[u64]) -> Vec<i64> {
        (0..self.d)
            .map(|i| {
                let s: i128 = (i..self.d).map(|k| binom(k, i) * g[k] as i128).sum();
                self.reduce(s) as i64
            })
            .collect()
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> Vector {
        let mut out = vec![0u128; self.d];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                let k = (i + j) % self.d;
                out[k] = (out[k] + x as u128 * y as u128) % self.modulus as u128;
            }
        }
        out.into_iter().map(|v| v as u64).collect()
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Vector {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x + y) % self.modulus)
            .collect()
    }

    pub fn all_elements(&self) -> Vec<Vector> {
        let total = (self.modulus as usize).pow(self.d as u32);
        (0..total)
            .map(|mut idx| {
                let mut v = vec![0u64; self.d];
                for slot in v.iter_mut() {
                    *slot = (idx % self.modulus as usize) as u64;
                    idx /= self.modulus as usize;
                }
                v
            })
            .collect()
    }

    pub fn additive_closure(&self, seeds: impl IntoIterator<Item = Vector>) -> HashSet<Vector> {
        let seeds: Vec<Vector> = seeds.into_iter().collect();
        let mut set: HashSet<Vector> = HashSet::new();
        let zero = vec![0u64; self.d];
        set.insert(zero.clone());
        let mut frontier = vec![zero];
        let distinct: HashSet<Vector> = seeds.into_iter().collect();
        while let Some(v) = frontier.pop() {
            for s in &distinct {
                let w = self.add(&v, s);
                if set.insert(w.clone()) {
                    frontier.push(w);
                }
            }
        }
        set
    }

    /// Every element of the ideal generated by `gens`.
    pub fn ideal(&self, gens: &[Vector]) -> HashSet<Vector> {
        let ring = self.all_elements();
        let multiples = gens
            .iter()
            .flat_map(|g| ring.iter().map(move |r| self.mul(r, g)))
            .collect::<Vec<_>>();
        self.additive_closure(multiples)
    }

    pub fn product(&self, a: &HashSet<Vector>, b: &HashSet<Vector>) -> HashSet<Vector> {
        let mut prods = HashSet::new();
        for x in a {
            for y in b {
                prods.insert(self.mul(x, y));
            }
        }
        self.additive_closure(prods)
    }

    /// Some `x ∈ I` with `(x) = I`, found by trying every element.
    pub fn principal_generator(&self, ideal: &HashSet<Vector>) -> Option<Vector> {
        let ring = self.all_elements();
        let mut candidates: Vec<&Vector> = ideal.iter().collect();
        candidates.sort();
        candidates.into_iter().find_map(|x| {
            let principal: HashSet<Vector> = ring.iter().map(|r| self.mul(r, x)).collect();
            (principal.len() == ideal.len() && principal.is_subset(ideal)).then(|| x.clone())
        })
    }
}

/// Determinant by the Leibniz permutation sum.
pub fn leibniz_det(m: &[Vec<LayerElement>]) -> LayerElement {
    let k = m.len();
    let ctx = m[0][0].ctx();
    let n = m[0][0].layer();
    let mut acc = LayerElement::zero(ctx, n);
    let mut perm: Vec<usize> = (0..k).collect();
    permute(&mut perm, 0, &mut |p| {
        let mut term = LayerElement::one(ctx, n);
        for (r, &c) in p.iter().enumerate() {
            term = &term * &m[r][c];
        }
        acc = if parity(p) { &acc - &term } else { &acc + &term };
    });
    acc
}

fn permute(v: &mut Vec<usize>, start: usize, f: &mut impl FnMut(&[usize])) {
    if start == v.len() {
        f(v);
        return;
    }
    for i in start..v.len() {
        v.swap(start, i);
        permute(v, start + 1, f);
        v.swap(start, i);
    }
}

/// True for odd permutations.
fn parity(p: &[usize]) -> bool {
    let mut inversions = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    inversions % 2 == 1
}

/// A strict tower built from a chosen `θ_0`, with the same recursion as the
/// library generator. Taking `θ_0 ∈ pZ` keeps the ideals proper.
pub fn tower_from_base<R: Rng>(
    rng: &mut R,
    ctx: PadicContext,
    top: usize,
    ap: PadicScalar,
    theta0: PadicScalar,
) -> ThetaTower {
    let mut levels = vec![LayerElement::constant(theta0, 0)];
    for n in 0..top {
        let target = if n == 0 {
            levels[0].scale(ap - ctx.one())
        } else {
            &levels[n].scale(ap) - &levels[n - 1].norm_map()
        };
        let layer = n as u32 + 1;
        let noise = &omega(ctx, n as u32, layer).unwrap() * &LayerElement::random(ctx, layer, rng);
        levels.push(&target.lift() + &noise);
    }
    ThetaTower::new(ap, levels).unwrap()
}

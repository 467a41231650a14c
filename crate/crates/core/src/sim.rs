//! Configuration-model multigraph simulation: i.i.d. degree sampling,
//! uniform stub matching, and largest-component measurement.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::branching;
use crate::dist::DegreeDistribution;
use crate::error::{Error, Result};
use crate::mixing::MixingDistribution;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeSequence {
    pub degrees: Vec<u32>,
}

impl DegreeSequence {
    pub fn total(&self) -> u64 {
        self.degrees.iter().map(|&d| d as u64).sum()
    }
}

/// Undirected multigraph; loops and parallel edges permitted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiGraph {
    pub n: usize,
    pub edges: Vec<(u32, u32)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentStats {
    pub n: usize,
    pub reps: usize,
    pub fractions: Vec<f64>,
    pub mean: f64,
    pub stddev: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predicted_zeta: Option<f64>,
}

struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            // path halving
            let gp = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = gp;
            x = gp;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let mut ra = self.find(a);
        let mut rb = self.find(b);
        if ra == rb {
            return;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.size[ra as usize] += self.size[rb as usize];
        self.parent[rb as usize] = ra;
    }

    fn max_component(&mut self) -> u32 {
        (0..self.parent.len() as u32)
            .map(|i| {
                let r = self.find(i);
                self.size[r as usize]
            })
            .max()
            .unwrap_or(0)
    }
}

fn sample_one(d: &DegreeDistribution, finite_cdf: Option<&Vec<(u32, f64)>>, rng: &mut ChaCha8Rng) -> u32 {
    match d {
        DegreeDistribution::Finite(_) => {
            let table = finite_cdf.expect("finite sampler table");
            let u: f64 = rng.gen();
            for &(k, cum) in table {
                if u <= cum {
                    return k;
                }
            }
            table.last().map(|&(k, _)| k).unwrap_or(0)
        }
        DegreeDistribution::Poisson { lambda } => sample_poisson(*lambda, rng),
        DegreeDistribution::Binomial { n, p } => {
            let bin = rand_distr::Binomial::new(*n as u64, *p).expect("valid binomial");
            bin.sample(rng) as u32
        }
        DegreeDistribution::MixedPoisson(mu) => {
            let rate = sample_mixing(mu, rng);
            sample_poisson(rate, rng)
        }
        DegreeDistribution::Thinned { base, r } => {
            let k = sample_one(base, None, rng);
            if k == 0 {
                0
            } else {
                let bin = rand_distr::Binomial::new(k as u64, *r).expect("valid binomial");
                bin.sample(rng) as u32
            }
        }
    }
}

fn sample_poisson(lambda: f64, rng: &mut ChaCha8Rng) -> u32 {
    if lambda <= 0.0 {
        return 0;
    }
    let poi = rand_distr::Poisson::new(lambda).expect("valid poisson rate");
    let v: f64 = poi.sample(rng);
    v.min(u32::MAX as f64) as u32
}

fn sample_mixing(mu: &MixingDistribution, rng: &mut ChaCha8Rng) -> f64 {
    match *mu {
        MixingDistribution::Dirac { x } => x,
        MixingDistribution::Pareto { alpha, scale } => {
            // inverse cdf: c (1-U)^{-1/alpha}
            let u: f64 = rng.gen();
            scale * (1.0 - u).powf(-1.0 / alpha)
        }
        MixingDistribution::Lognormal { location, scale2 } => {
            let z: f64 = rand_distr::StandardNormal.sample(rng);
            (location + scale2.sqrt() * z).exp()
        }
    }
}

fn finite_cdf_table(d: &DegreeDistribution) -> Option<Vec<(u32, f64)>> {
    if let DegreeDistribution::Finite(p) = d {
        let mut cum = 0.0;
        Some(
            p.support()
                .map(|(k, m)| {
                    cum += m;
                    (k, cum)
                })
                .collect(),
        )
    } else {
        None
    }
}

/// n i.i.d. draws from the degree law; if the total is odd, one uniformly
/// chosen node gets its degree bumped by one so that stub matching is
/// possible. Deterministic given the seed.
pub fn sample_degree_sequence(d: &DegreeDistribution, n: usize, seed: u64) -> DegreeSequence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let table = finite_cdf_table(d);
    let mut degrees: Vec<u32> = (0..n)
        .map(|_| sample_one(d, table.as_ref(), &mut rng))
        .collect();
    let total: u64 = degrees.iter().map(|&x| x as u64).sum();
    if total % 2 == 1 {
        let i = rng.gen_range(0..n);
        degrees[i] += 1;
    }
    DegreeSequence { degrees }
}

/// Uniform random perfect matching on the stubs: shuffle the stub array
/// with a seeded generator, pair consecutive entries.
pub fn match_stubs(ds: &DegreeSequence, seed: u64) -> Result<MultiGraph> {
    let total = ds.total();
    if total % 2 == 1 {
        return Err(Error::OddDegreeSum);
    }
    let mut stubs: Vec<u32> = Vec::with_capacity(total as usize);
    for (node, &deg) in ds.degrees.iter().enumerate() {
        for _ in 0..deg {
            stubs.push(node as u32);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    stubs.shuffle(&mut rng);
    let edges = stubs.chunks_exact(2).map(|c| (c[0], c[1])).collect();
    Ok(MultiGraph { n: ds.degrees.len(), edges })
}

/// |C_max| / n via union-find. Loops are ignored for connectivity and
/// parallel edges are idempotent.
pub fn largest_component_fraction(g: &MultiGraph) -> f64 {
    if g.n == 0 {
        return 0.0;
    }
    let mut uf = UnionFind::new(g.n);
    for &(u, v) in &g.edges {
        if u != v {
            uf.union(u, v);
        }
    }
    uf.max_component() as f64 / g.n as f64
}

fn replicate_seed(seed: u64, rep: u64) -> u64 {
    // splitmix64 step keeps per-replicate streams disjoint
    let mut z = seed
        .wrapping_add(rep.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Run `reps` independent sample/match/measure pipelines. Replicates use
/// disjoint derived seeds and may execute in parallel; results are merged
/// by replicate index, so the output is deterministic.
pub fn simulate_zeta(
    d: &DegreeDistribution,
    n: usize,
    reps: usize,
    seed: u64,
) -> Result<ComponentStats> {
    if n == 0 || reps == 0 {
        return Err(Error::InvalidParameter(
            "node count and replicate count must be at least 1".into(),
        ));
    }
    let fractions: Vec<f64> = (0..reps as u64)
        .into_par_iter()
        .map(|rep| {
            let s = replicate_seed(seed, rep);
            let ds = sample_degree_sequence(d, n, s);
            let g = match_stubs(&ds, replicate_seed(s, 0x5EED)).expect("parity fixed");
            largest_component_fraction(&g)
        })
        .collect();
    let mean = fractions.iter().sum::<f64>() / reps as f64;
    let stddev = if reps > 1 {
        (fractions.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / (reps - 1) as f64).sqrt()
    } else {
        0.0
    };
    let predicted_zeta = branching::zeta_cm(d, branching::DEFAULT_TOL)
        .ok()
        .map(|z| z.zeta_cm);
    Ok(ComponentStats { n, reps, fractions, mean, stddev, predicted_zeta })
}

/// Rebuild the graph of the final replicate of a `simulate_zeta` run,
/// for edge-list dumps.
pub fn last_replicate_graph(
    d: &DegreeDistribution,
    n: usize,
    reps: usize,
    seed: u64,
) -> Result<MultiGraph> {
    if n == 0 || reps == 0 {
        return Err(Error::InvalidParameter(
            "node count and replicate count must be at least 1".into(),
        ));
    }
    let s = replicate_seed(seed, reps as u64 - 1);
    let ds = sample_degree_sequence(d, n, s);
    match_stubs(&ds, replicate_seed(s, 0x5EED))
}

/// Edge-list text dump: one "u v" pair per line, 1-indexed, loops as
/// "u u".
pub fn write_edge_list<W: std::io::Write>(g: &MultiGraph, mut out: W) -> std::io::Result<()> {
    for &(u, v) in &g.edges {
        writeln!(out, "{} {}", u + 1, v + 1)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pmf::FinitePmf;

    #[test]
    fn regular_degrees_need_no_parity_fix() {
        let d = DegreeDistribution::Finite(FinitePmf::dirac(2));
        let ds = sample_degree_sequence(&d, 10, 7);
        assert!(ds.degrees.iter().all(|&x| x == 2));
        assert_eq!(ds.total(), 20);
    }

    #[test]
    fn odd_total_bumps_one_node() {
        let d = DegreeDistribution::Finite(FinitePmf::dirac(1));
        let ds = sample_degree_sequence(&d, 3, 42);
        assert_eq!(ds.total(), 4);
        assert_eq!(ds.degrees.iter().filter(|&&x| x == 2).count(), 1);
    }

    #[test]
    fn empirical_pmf_matches_poisson() {
        let d = DegreeDistribution::poisson(2.0).unwrap();
        let n = 1_000_000;
        let ds = sample_degree_sequence(&d, n, 11);
        let mut counts = vec![0u64; 32];
        for &deg in &ds.degrees {
            if (deg as usize) < counts.len() {
                counts[deg as usize] += 1;
            }
        }
        for k in 0..=10u32 {
            let want = d.pmf(k);
            let got = counts[k as usize] as f64 / n as f64;
            let se = (want * (1.0 - want) / n as f64).sqrt();
            assert!(
                (got - want).abs() <= 3.0 * se + 2.0 / n as f64,
                "k={k}: {got} vs {want} (se {se})"
            );
        }
    }

    #[test]
    fn two_stubs_make_the_only_matchings() {
        let ds = DegreeSequence { degrees: vec![1, 1] };
        let g = match_stubs(&ds, 0).unwrap();
        assert_eq!(g.edges.len(), 1);
        let (u, v) = g.edges[0];
        assert_eq!((u.min(v), u.max(v)), (0, 1));
        let loopy = DegreeSequence { degrees: vec![2] };
        let g = match_stubs(&loopy, 0).unwrap();
        assert_eq!(g.edges, vec![(0, 0)]);
    }

    #[test]
    fn four_stub_matchings_are_uniform() {
        // degrees [1,1,1,1]: each of the 3 perfect matchings has mass 1/3
        let ds = DegreeSequence { degrees: vec![1, 1, 1, 1] };
        let trials = 30_000;
        let mut counts = [0u64; 3];
        for seed in 0..trials {
            let g = match_stubs(&ds, seed).unwrap();
            let partner_of_0 = g
                .edges
                .iter()
                .find_map(|&(u, v)| {
                    if u == 0 { Some(v) } else if v == 0 { Some(u) } else { None }
                })
                .unwrap();
            counts[partner_of_0 as usize - 1] += 1;
        }
        let expect = trials as f64 / 3.0;
        let sigma = (trials as f64 * (1.0 / 3.0) * (2.0 / 3.0)).sqrt();
        for c in counts {
            assert!((c as f64 - expect).abs() < 3.0 * sigma, "{counts:?}");
        }
    }

    #[test]
    fn odd_sum_rejected() {
        let ds = DegreeSequence { degrees: vec![1, 1, 1] };
        assert!(matches!(match_stubs(&ds, 0), Err(Error::OddDegreeSum)));
    }

    #[test]
    fn component_fraction_examples() {
        // path on 5 nodes
        let path = MultiGraph { n: 5, edges: vec![(0, 1), (1, 2), (2, 3), (3, 4)] };
        assert_eq!(largest_component_fraction(&path), 1.0);
        // isolated nodes
        let iso = MultiGraph { n: 5, edges: vec![] };
        assert_eq!(largest_component_fraction(&iso), 0.2);
        // components of sizes 3 and 2
        let two = MultiGraph { n: 5, edges: vec![(0, 1), (1, 2), (3, 4)] };
        assert_eq!(largest_component_fraction(&two), 0.6);
        // loops and parallels do not affect connectivity
        let decorated = MultiGraph { n: 5, edges: vec![(0, 0), (0, 1), (0, 1), (1, 2), (3, 4)] };
        assert_eq!(largest_component_fraction(&decorated), 0.6);
    }

    #[test]
    fn stub_conservation() {
        let d = DegreeDistribution::poisson(2.0).unwrap();
        for seed in 0..5 {
            let ds = sample_degree_sequence(&d, 500, seed);
            let g = match_stubs(&ds, seed + 100).unwrap();
            assert_eq!(2 * g.edges.len() as u64, ds.total());
        }
    }

    #[test]
    fn seed_determinism() {
        let d = DegreeDistribution::poisson(1.5).unwrap();
        let a = sample_degree_sequence(&d, 1000, 99);
        let b = sample_degree_sequence(&d, 1000, 99);
        assert_eq!(a, b);
        let ga = match_stubs(&a, 7).unwrap();
        let gb = match_stubs(&b, 7).unwrap();
        assert_eq!(ga, gb);
        let s1 = simulate_zeta(&d, 2000, 4, 3).unwrap();
        let s2 = simulate_zeta(&d, 2000, 4, 3).unwrap();
        assert_eq!(s1.fractions, s2.fractions);
    }

    #[test]
    fn subcritical_has_no_giant() {
        let d = DegreeDistribution::poisson(0.8).unwrap();
        let stats = simulate_zeta(&d, 100_000, 3, 17).unwrap();
        assert!(stats.mean < 0.01, "mean fraction {}", stats.mean);
        assert_eq!(stats.predicted_zeta, Some(0.0));
    }
}

//! Invariant checks shared by the property tests and the acceptance gate.
//!
//! Each check returns `Err(description)` on the first violation so that the
//! acceptance binary can report it without unwinding.

#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use qsbm::born::{loss_and_gradient, output_distribution, ModelSpec};
use qsbm::metrics::{kld, nll, shannon_entropy};
use qsbm::rbm::RbmParams;
use qsbm::rng::RandomStream;
use qsbm::scramblers::{
    build_hamiltonian, compile_scrambler, half_chain_page_entropy, HamiltonianPreset, ScramblerSpec,
};
use qsbm::statevector::{gates, haar_unitary, Axis, StateVector};
use qsbm::targets::{joint_index, split_index, TargetSpec};
use qsbm::training::clip_gradient;
use qsbm::C64;

pub type Check = fn() -> Result<(), String>;

pub const CHECKS: &[(&str, Check)] = &[
    ("norm preservation", norm_preservation),
    ("single-qubit locality", locality),
    ("marginal equals RDM diagonal", marginal_rdm_consistency),
    ("entropy bounds", entropy_bounds),
    ("Gibbs inequality", gibbs_inequality),
    ("NLL = KLD + H", nll_identity),
    ("loss lower bound", loss_lower_bound),
    ("expm unitarity", expm_unitarity),
    ("RBM brute-force equivalence", rbm_brute_force),
    ("target normalization", target_normalization),
    ("2D index round trip", index_round_trip),
    ("gradient clipping bound", clipping_bound),
    ("compilation determinism", compilation_determinism),
    ("Haar typicality N=6,8", haar_typicality),
    ("brickwork approaches Page", brickwork_convergence),
    ("analog entropy growth", analog_entropy_growth),
];

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() })
}

fn run<S: Strategy>(cases: u32, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String> {
    runner(cases).run(&strategy, test).map_err(|e| e.to_string())
}

fn random_state(n: usize, seed: u64) -> StateVector {
    let u = haar_unitary(1 << n, &mut RandomStream::new(seed));
    let mut psi = StateVector::zero_state(n).unwrap();
    psi.apply_dense_unitary(&u).unwrap();
    psi
}

fn normalized(raw: &[f64]) -> Vec<f64> {
    let s: f64 = raw.iter().sum();
    raw.iter().map(|x| x / s).collect()
}

#[derive(Clone, Debug)]
enum Op {
    Rot(usize, u8, f64),
    Two(usize, usize, u64),
    Dense(u64),
}

fn op(n: usize) -> impl Strategy<Value = Op> {
    prop_oneof![
        4 => (0..n, 0u8..3, -10.0..10.0f64).prop_map(|(q, a, t)| Op::Rot(q, a, t)),
        3 => (0..n, 1..n, any::<u64>()).prop_map(move |(a, d, s)| Op::Two(a, (a + d) % n, s)),
        1 => any::<u64>().prop_map(Op::Dense),
    ]
}

fn axis(a: u8) -> Axis {
    [Axis::X, Axis::Y, Axis::Z][a as usize]
}

fn haar_gate2(seed: u64) -> gates::Gate2 {
    let u = haar_unitary(4, &mut RandomStream::new(seed));
    let mut g = [[C64::new(0.0, 0.0); 4]; 4];
    for (i, row) in g.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = u.get(i, j);
        }
    }
    g
}

pub fn norm_preservation() -> Result<(), String> {
    let strategy = (2usize..=6).prop_flat_map(|n| (Just(n), prop::collection::vec(op(n), 1..40)));
    run(64, strategy, |(n, ops)| {
        let mut psi = StateVector::zero_state(n).unwrap();
        for o in &ops {
            match *o {
                Op::Rot(q, a, t) => psi.apply_single_qubit_gate(q, &gates::rotation(axis(a), t)).unwrap(),
                Op::Two(a, b, s) => psi.apply_two_qubit_gate(a, b, &haar_gate2(s)).unwrap(),
                Op::Dense(s) => psi.apply_dense_unitary(&haar_unitary(1 << n, &mut RandomStream::new(s))).unwrap(),
            }
        }
        prop_assert!((psi.norm_sqr() - 1.0).abs() < 1e-10, "norm² = {}", psi.norm_sqr());
        prop_assert!(psi.amplitudes().iter().all(|z| z.re.is_finite() && z.im.is_finite()));
        Ok(())
    })
}

pub fn locality() -> Result<(), String> {
    let strategy = (2usize..=6).prop_flat_map(|n| {
        (Just(n), 0..n, 1..n, 0u8..3, 0u8..3, -7.0..7.0f64, -7.0..7.0f64, any::<u64>())
    });
    run(64, strategy, |(n, q, d, a, b, t, u, seed)| {
        let r = (q + d) % n;
        let (g, h) = (gates::rotation(axis(a), t), gates::rotation(axis(b), u));
        let psi = random_state(n, seed);
        let mut x = psi.clone();
        x.apply_single_qubit_gate(q, &g).unwrap();
        x.apply_single_qubit_gate(r, &h).unwrap();
        let mut y = psi;
        y.apply_single_qubit_gate(r, &h).unwrap();
        y.apply_single_qubit_gate(q, &g).unwrap();
        for (p, s) in x.amplitudes().iter().zip(y.amplitudes()) {
            prop_assert!((p - s).norm() < 1e-12);
        }
        Ok(())
    })
}

pub fn marginal_rdm_consistency() -> Result<(), String> {
    let strategy = (2usize..=6).prop_flat_map(|n| (Just(n), 1..n, any::<u64>()));
    run(64, strategy, |(n, na, seed)| {
        let psi = random_state(n, seed);
        let ancillas: Vec<usize> = (n - na..n).collect();
        let kept: Vec<usize> = (0..n - na).collect();
        let q = psi.marginal_probabilities(&ancillas).unwrap();
        let rho = psi.reduced_density_matrix(&kept).unwrap();
        prop_assert!((rho.trace() - 1.0).abs() < 1e-10);
        prop_assert!(rho.matrix.hermiticity_error() < 1e-10);
        prop_assert!(rho.eigenvalues().iter().all(|&l| l > -1e-10));
        for (x, qx) in q.iter().enumerate() {
            prop_assert!((rho.matrix.get(x, x).re - qx).abs() < 1e-12);
        }
        Ok(())
    })
}

pub fn entropy_bounds() -> Result<(), String> {
    let strategy = (2usize..=6).prop_flat_map(|n| {
        (Just(n), prop::sample::subsequence((0..n).collect::<Vec<_>>(), 1..n), any::<u64>())
    });
    run(64, strategy, |(n, kept, seed)| {
        let psi = random_state(n, seed);
        let s = psi.reduced_density_matrix(&kept).unwrap().von_neumann_entropy();
        let bound = kept.len() as f64 * std::f64::consts::LN_2;
        prop_assert!(s >= 0.0 && s <= bound + 1e-12, "S = {s}, bound {bound}");
        Ok(())
    })
}

fn distribution(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01..1.0f64, len).prop_map(|v| normalized(&v))
}

fn sparse_distribution(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![1 => Just(0.0), 3 => 0.01..1.0f64], len)
        .prop_filter("nonzero mass", |v| v.iter().sum::<f64>() > 0.0)
        .prop_map(|v| normalized(&v))
}

pub fn gibbs_inequality() -> Result<(), String> {
    let strategy = (1usize..64).prop_flat_map(|n| (sparse_distribution(n), distribution(n)));
    run(256, strategy, |(p, q)| {
        let d = kld(&p, &q).unwrap();
        prop_assert!(d >= -1e-10, "KLD = {d}");
        Ok(())
    })
}

pub fn nll_identity() -> Result<(), String> {
    let strategy = (1usize..64).prop_flat_map(|n| (sparse_distribution(n), distribution(n)));
    run(256, strategy, |(p, q)| {
        let lhs = nll(&p, &q).unwrap();
        let rhs = kld(&p, &q).unwrap() + shannon_entropy(&p);
        prop_assert!((lhs - rhs).abs() < 1e-12, "{lhs} vs {rhs}");
        Ok(())
    })
}

pub fn loss_lower_bound() -> Result<(), String> {
    let strategy = (2usize..=4, 0usize..=1, 1usize..=2, 0u8..3, any::<u64>());
    run(32, strategy, |(n, na, layers, variant, seed)| {
        let spec = match variant {
            0 => ScramblerSpec::Haar,
            1 => ScramblerSpec::Brickwork { depth: 2 },
            _ => ScramblerSpec::analog(HamiltonianPreset::Xx, n, 0.7),
        };
        let mut rng = RandomStream::new(seed);
        let model = ModelSpec::fixed(n, na, layers, spec.clone()).unwrap();
        let s = compile_scrambler(&spec, n, &mut rng).unwrap();
        let params = model.init_params(&mut rng);
        let raw: Vec<f64> = (0..model.num_bins()).map(|_| rand::Rng::random_range(&mut rng, 0.0..1.0)).collect();
        let p = normalized(&raw);
        let q = output_distribution(&model, &params, Some(&s)).unwrap();
        prop_assume!(q.iter().all(|&x| x > 1e-12));
        let (loss, grad) = loss_and_gradient(&model, &params, Some(&s), &p).unwrap();
        prop_assert!(loss >= shannon_entropy(&p) - 1e-9);
        prop_assert!(grad.iter().all(|g| g.is_finite()));
        Ok(())
    })
}

pub fn expm_unitarity() -> Result<(), String> {
    let strategy = (2usize..=7, prop::bool::ANY, 0.0..20.0f64);
    run(24, strategy, |(n, tfim, tau)| {
        let preset = if tfim { HamiltonianPreset::Tfim } else { HamiltonianPreset::Xx };
        let s = compile_scrambler(&ScramblerSpec::analog(preset, n, tau), n, &mut RandomStream::new(0)).unwrap();
        let err = s.to_dense().unwrap().unitarity_error();
        prop_assert!(err <= 1e-8, "‖U†U − I‖ = {err}");
        let h = build_hamiltonian(&preset.spec(n)).unwrap().to_dense().unwrap();
        prop_assert!(h.hermiticity_error() < 1e-12);
        Ok(())
    })
}

// Oracle: p(v) by summing exp(a·v + b·h + vᵀWh) over every joint (v, h).
fn brute_force_marginal(rbm: &RbmParams) -> Vec<f64> {
    let (nv, nh) = (rbm.num_visible, rbm.num_hidden);
    let mut p = vec![0.0; 1 << nv];
    for (v, pv) in p.iter_mut().enumerate() {
        for h in 0..1usize << nh {
            let mut e = 0.0;
            for i in 0..nv {
                let vi = ((v >> i) & 1) as f64;
                e += rbm.visible_bias[i] * vi;
                for j in 0..nh {
                    e += vi * rbm.weights[i * nh + j] * ((h >> j) & 1) as f64;
                }
            }
            for j in 0..nh {
                e += rbm.hidden_bias[j] * ((h >> j) & 1) as f64;
            }
            *pv += e.exp();
        }
    }
    normalized(&p)
}

pub fn rbm_brute_force() -> Result<(), String> {
    let strategy = (1usize..=4, 1usize..=4).prop_flat_map(|(nv, nh)| {
        let w = prop::collection::vec(-2.0..2.0f64, nv * nh);
        let a = prop::collection::vec(-2.0..2.0f64, nv);
        let b = prop::collection::vec(-2.0..2.0f64, nh);
        (Just(nv), Just(nh), w, a, b)
    });
    run(128, strategy, |(nv, nh, weights, visible_bias, hidden_bias)| {
        let rbm = RbmParams { num_visible: nv, num_hidden: nh, weights, visible_bias, hidden_bias };
        let exact = rbm.exact_distribution();
        prop_assert!(exact.iter().all(|&x| x > 0.0));
        prop_assert!((exact.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        for (a, b) in exact.iter().zip(brute_force_marginal(&rbm)) {
            prop_assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
        Ok(())
    })
}

pub fn target_normalization() -> Result<(), String> {
    let strategy = (2usize..=10, 0u8..3, -0.95..0.95f64, 0u64..1000);
    run(64, strategy, |(bits, kind, rho, seed)| {
        let spec = match kind {
            0 => TargetSpec::Multimodal1d { weight_seed: seed },
            1 => TargetSpec::BivariateGaussian2d { rho },
            _ => TargetSpec::FourModeMixture2d,
        };
        prop_assume!(kind != 0 || bits >= 3);
        prop_assume!(kind != 2 || bits >= 4);
        let t = spec.build(bits, Some(rho)).unwrap();
        prop_assert_eq!(t.len(), 1 << bits);
        prop_assert!(t.iter().all(|&x| x >= 0.0));
        prop_assert!((t.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        Ok(())
    })
}

pub fn index_round_trip() -> Result<(), String> {
    let strategy = (1usize..=6, 1usize..=6).prop_flat_map(|(nx, ny)| (Just(nx), 0..1usize << (nx + ny)));
    run(256, strategy, |(nx, bin)| {
        let (ix, iy) = split_index(bin, nx);
        prop_assert!(ix < 1 << nx);
        prop_assert_eq!(joint_index(ix, iy, nx), bin);
        Ok(())
    })
}

pub fn clipping_bound() -> Result<(), String> {
    let strategy = (prop::collection::vec(-1e6..1e6f64, 1..300), 1e-3..10.0f64);
    run(256, strategy, |(g, clip)| {
        let c = clip_gradient(&g, clip);
        let norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assert!(norm <= clip * (1.0 + 1e-12), "{norm} > {clip}");
        let before = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if before <= clip {
            prop_assert_eq!(&c, &g);
        }
        Ok(())
    })
}

pub fn compilation_determinism() -> Result<(), String> {
    let strategy = (2usize..=6, 1usize..=4, any::<u64>(), 0u8..3);
    run(32, strategy, |(n, depth, seed, variant)| {
        let spec = match variant {
            0 => ScramblerSpec::Haar,
            1 => ScramblerSpec::Brickwork { depth },
            _ => ScramblerSpec::analog(HamiltonianPreset::Tfim, n, depth as f64 * 0.3),
        };
        let a = compile_scrambler(&spec, n, &mut RandomStream::new(seed).substream("scrambler")).unwrap();
        let b = compile_scrambler(&spec, n, &mut RandomStream::new(seed).substream("scrambler")).unwrap();
        prop_assert_eq!(a.to_dense().unwrap(), b.to_dense().unwrap());
        prop_assert_eq!(a.gates(), b.gates());
        Ok(())
    })
}

/// Mean and population standard deviation of the half-chain entropy of
/// `U_S|0…0⟩` over `draws` compilations of `spec`.
pub fn entropy_stats(spec: &ScramblerSpec, n: usize, draws: u64, seed: u64) -> (f64, f64) {
    let root = RandomStream::new(seed);
    let s: Vec<f64> = (0..draws)
        .map(|d| {
            let mut rng = root.substream_index(d);
            compile_scrambler(spec, n, &mut rng).unwrap().half_chain_entropy().unwrap()
        })
        .collect();
    let mean = s.iter().sum::<f64>() / s.len() as f64;
    let var = s.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / s.len() as f64;
    (mean, var.sqrt())
}

pub fn haar_typicality() -> Result<(), String> {
    for n in [6, 8] {
        let (mean, _) = entropy_stats(&ScramblerSpec::Haar, n, 50, 11 + n as u64);
        let page = half_chain_page_entropy(n);
        if (mean - page).abs() > 0.01 * page {
            return Err(format!("N={n}: mean {mean:.4} vs Page {page:.4}"));
        }
    }
    Ok(())
}

/// Brickwork depths probed at N=8, shallow to saturated.
pub const BRICKWORK_DEPTHS: [usize; 10] = [1, 2, 3, 4, 5, 6, 8, 12, 16, 20];

/// Per-depth (K, mean, std) of the N=8 half-chain entropy over 20 draws.
pub fn brickwork_profile() -> Vec<(usize, f64, f64)> {
    BRICKWORK_DEPTHS
        .iter()
        .map(|&k| {
            let (m, s) = entropy_stats(&ScramblerSpec::Brickwork { depth: k }, 8, 20, 500);
            (k, m, s)
        })
        .collect()
}

/// Mean entropy never drops by more than 1σ as K grows, and is within 5% of
/// Page once the circuit is deep enough (K ≥ 16 = 2N alternating layers).
pub fn brickwork_convergence() -> Result<(), String> {
    let page = half_chain_page_entropy(8);
    let profile = brickwork_profile();
    for w in profile.windows(2) {
        let ((pk, pm, ps), (k, m, s)) = (w[0], w[1]);
        if m < pm - s.max(ps) {
            return Err(format!("K={k} mean {m:.4} below K={pk} mean {pm:.4} by more than 1σ"));
        }
    }
    for &(k, m, _) in profile.iter().filter(|p| p.0 >= 16) {
        if (m - page).abs() > 0.05 * page {
            return Err(format!("K={k}: mean {m:.4} vs Page {page:.4}"));
        }
    }
    Ok(())
}

/// Half-chain entropy of `e^{−iτH}|0…0⟩` at N=8.
pub fn analog_entropy(preset: HamiltonianPreset, tau: f64) -> f64 {
    let spec = ScramblerSpec::analog(preset, 8, tau);
    compile_scrambler(&spec, 8, &mut RandomStream::new(0)).unwrap().half_chain_entropy().unwrap()
}

/// Both chains start unentangled; the XX chain reaches within 10% of Page by
/// τ = 5. The TFIM preset is integrable and saturates well below Page, so
/// only its early-time behavior is checked here.
pub fn analog_entropy_growth() -> Result<(), String> {
    let page = half_chain_page_entropy(8);
    for preset in [HamiltonianPreset::Tfim, HamiltonianPreset::Xx] {
        for tau in [1e-3, 1e-2] {
            let s = analog_entropy(preset, tau);
            if s > 1e-3 {
                return Err(format!("{}: S(τ={tau}) = {s:.3e}", preset.name()));
            }
        }
    }
    for tau in [5.0, 10.0, 20.0] {
        let s = analog_entropy(HamiltonianPreset::Xx, tau);
        if (s - page).abs() > 0.1 * page {
            return Err(format!("xx: S(τ={tau}) = {s:.4}, Page {page:.4}"));
        }
    }
    Ok(())
}

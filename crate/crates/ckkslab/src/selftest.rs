//! Numbered reproduction checks shared by the acceptance harness and the
//! command-line self-test.
//!
//! The wide-integer references here never call into the code they check:
//! modular results are compared with u128 and big-integer arithmetic, NTT
//! products with schoolbook convolution, and RNS conversions with CRT
//! reconstruction.

use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::apps::{run_demo, DemoConfig};
use crate::ckks::{decrypt_values, encrypt_values, keygen, max_error, CkksParams, Evaluator, KeyRequest, ParamSpec};
use crate::cost::search::{param_search, SearchSpace};
use crate::cost::{cost_of_bootstrap, OptimizationSet};
use crate::dram::{compare_mappings, DramSetup, Pattern};
use crate::fixtures::{Presets, Targets};
use crate::report::{cost_deviations, cost_tables, optimized_rows, throughput_table};
use crate::rns::{basis_convert, mod_down, rescale, Prime, Rep, RnsBasis, RnsPoly};
use crate::zq::{gen_ntt_prime, gen_ntt_primes, is_prime, Modulus, NttTable};

/// Outcome of one numbered criterion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub criterion: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
    pub budget_seconds: f64,
}

impl Check {
    pub fn line(&self) -> String {
        format!(
            "[{}] {}. {}: {} ({:.2} s of {:.0} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.criterion,
            self.name,
            self.detail,
            self.seconds,
            self.budget_seconds
        )
    }
}

pub const CRITERIA: [(u8, &str, f64); 9] = [
    (1, "baseline cost tables", 5.0),
    (2, "optimized bootstrap endpoint", 5.0),
    (3, "throughput comparison", 1.0),
    (4, "parameter search", 60.0),
    (5, "DRAM address mapping", 30.0),
    (6, "functional CKKS properties", 300.0),
    (7, "toy bootstrap", 600.0),
    (8, "encrypted logistic regression", 900.0),
    (9, "arithmetic oracles", 120.0),
];

type Outcome = Result<(bool, String), String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Runs one criterion; errors and overruns count as failures.
pub fn run(criterion: u8) -> Check {
    let (_, name, budget) = CRITERIA.iter().copied().find(|c| c.0 == criterion).unwrap_or((criterion, "unknown", 0.0));
    let start = Instant::now();
    let outcome = match criterion {
        1 => cost_tables_check(),
        2 => optimized_check(),
        3 => throughput_check(),
        4 => search_check(),
        5 => dram_check(),
        6 => functional_check(),
        7 => bootstrap_check(),
        8 => lr_check(),
        9 => oracle_check(),
        _ => Err(format!("no criterion {criterion}")),
    };
    let seconds = start.elapsed().as_secs_f64();
    let (mut passed, mut detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    if seconds > budget {
        passed = false;
        detail.push_str("; over time budget");
    }
    Check { criterion, name, passed, detail, seconds, budget_seconds: budget }
}

pub fn run_all() -> Vec<Check> {
    CRITERIA.iter().map(|c| run(c.0)).collect()
}

fn cost_tables_check() -> Outcome {
    let p = Presets::load().map_err(err)?;
    let t = Targets::load().map_err(err)?;
    let rows = cost_tables(p.cost("baseline").map_err(err)?, &t).map_err(err)?;
    let devs = cost_deviations(&rows, &t);
    let worst = devs.iter().max_by(|a, b| a.relative.abs().total_cmp(&b.relative.abs())).ok_or("no rows")?;
    let bad: Vec<_> = devs.iter().filter(|d| !d.within).map(|d| format!("{} {}", d.name, d.column)).collect();
    Ok((
        bad.is_empty(),
        format!(
            "{} cells, worst {} {} {:+.2}%{}",
            devs.len(),
            worst.name,
            worst.column,
            100.0 * worst.relative,
            if bad.is_empty() { String::new() } else { format!("; outside: {}", bad.join(", ")) }
        ),
    ))
}

fn optimized_check() -> Outcome {
    let p = Presets::load().map_err(err)?;
    let t = Targets::load().map_err(err)?;
    let best = p.cost("best-case").map_err(err)?;
    let base = p.cost("baseline").map_err(err)?;
    let (_, devs) = optimized_rows(best, &t).map_err(err)?;
    let boot: Vec<_> = devs.iter().filter(|d| d.name == "Bootstrap").collect();
    let (b, _) = cost_of_bootstrap(&base.model(), &base.workload.bootstrap).map_err(err)?;
    let (o, _) = cost_of_bootstrap(&best.model(), &best.workload.bootstrap).map_err(err)?;
    let ai_gain = o.arithmetic_intensity() / b.arithmetic_intensity();
    let dram_gain = b.total_dram() / o.total_dram();
    let ok = !boot.is_empty()
        && boot.iter().all(|d| d.within)
        && ai_gain >= t.improvement.min_intensity
        && dram_gain >= t.improvement.min_dram;
    Ok((
        ok,
        format!(
            "{:.2} GOP / {:.2} GB / AI {:.2}; AI x{ai_gain:.2}, DRAM /{dram_gain:.2}",
            o.gop(),
            o.gb(),
            o.arithmetic_intensity()
        ),
    ))
}

fn throughput_check() -> Outcome {
    let t = Targets::load().map_err(err)?;
    let rows = throughput_table(&t).map_err(err)?;
    let ok = rows.iter().all(|r| r.relative.abs() <= t.tolerance);
    let s: Vec<String> = rows.iter().map(|r| format!("{:.2}", r.throughput)).collect();
    Ok((ok, s.join(" / ")))
}

fn search_check() -> Outcome {
    let t = Targets::load().map_err(err)?;
    let entries = param_search(&SearchSpace::standard(), OptimizationSet::all()).map_err(err)?;
    let top = entries.first().ok_or("empty search")?;
    let ok = (top.max_level, top.dnum, top.fft_iters) == (t.search.max_level, t.search.dnum, t.search.fft_iters);
    Ok((ok, format!("top of {}: L={} dnum={} fftIter={}", entries.len(), top.max_level, top.dnum, top.fft_iters)))
}

fn dram_check() -> Outcome {
    let t = Targets::load().map_err(err)?.dram;
    let s = DramSetup::default_setup();
    let traces = [s.workload.trace(Pattern::LimbWise, &s.config), s.workload.trace(Pattern::SlotWise, &s.config)];
    let maps = [("baseline", s.mapping("baseline").map_err(err)?), ("optimized", s.mapping("optimized").map_err(err)?)];
    let c = compare_mappings(&traces, &maps, &s.config).map_err(err)?;
    let mut ok = true;
    let mut cells = Vec::new();
    for (m, p, want) in [
        ("baseline", Pattern::LimbWise, t.baseline_limb_ms),
        ("baseline", Pattern::SlotWise, t.baseline_slot_ms),
        ("optimized", Pattern::LimbWise, t.optimized_limb_ms),
        ("optimized", Pattern::SlotWise, t.optimized_slot_ms),
    ] {
        let got = c.get(m, p).ok_or("missing entry")?.ms;
        ok &= (got / want - 1.0).abs() <= t.tolerance;
        cells.push(format!("{got:.2}"));
    }
    let imp = c.improvement("baseline", "optimized").ok_or("missing totals")?;
    ok &= (t.improvement_min..=t.improvement_max).contains(&imp);
    Ok((ok, format!("{} ms, improvement x{imp:.2}", cells.join(" / "))))
}

fn random_values(n: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

fn relative(got: &[Complex64], want: &[Complex64]) -> f64 {
    let norm = want.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    max_error(got, want) / norm
}

/// Worst errors of the functional properties at one ring degree.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FunctionalReport {
    pub log_n: u32,
    pub roundtrip: f64,
    pub mult: f64,
    pub rotate: f64,
    pub hrotate: f64,
    pub conjugate: f64,
    pub new_mult_gap: f64,
    pub new_mult_instances: usize,
    pub hrotate_identical: bool,
    pub compressed_identical: bool,
}

impl FunctionalReport {
    pub fn passed(&self) -> bool {
        let tight = 2f64.powi(-12);
        self.roundtrip < 2f64.powi(-20)
            && [self.mult, self.rotate, self.hrotate, self.conjugate].iter().all(|&e| e < tight)
            && self.new_mult_gap < NEW_MULT_NOISE
            && self.hrotate_identical
            && self.compressed_identical
    }
}

/// Two independent multiplication noises at a 2^50 scale stay far below this.
pub const NEW_MULT_NOISE: f64 = 1.0 / (1u64 << 30) as f64;

pub fn functional(log_n: u32, instances: usize, seed: u64) -> Result<FunctionalReport, String> {
    let max_level = 5;
    let p = CkksParams::new(ParamSpec {
        log_n,
        max_level,
        dnum: 3,
        q0_bits: 61,
        scale_bits: 50,
        p_bits: 61,
        radices: vec![],
    })
    .map_err(err)?;
    let n = p.slots();
    let shifts = [1i64, -1, 3, 5, 17];
    let req = |compressed| KeyRequest { relin: true, conjugate: true, rotations: shifts.to_vec(), compressed };
    let (sk, full) = keygen(&p, seed, &req(false));
    let (_, comp) = keygen(&p, seed, &req(true));
    let ev = Evaluator::new(&p, &full);
    let evc = Evaluator::new(&p, &comp);
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0x5eed);

    let mut r = FunctionalReport {
        log_n,
        roundtrip: 0.0,
        mult: 0.0,
        rotate: 0.0,
        hrotate: 0.0,
        conjugate: 0.0,
        new_mult_gap: 0.0,
        new_mult_instances: instances,
        hrotate_identical: true,
        compressed_identical: true,
    };
    for level in [0, max_level] {
        let x = random_values(n, &mut rng);
        let ct = encrypt_values(&p, &sk, &x, level, &mut rng).map_err(err)?;
        r.roundtrip = r.roundtrip.max(max_error(&decrypt_values(&p, &sk, &ct), &x));
    }

    let x = random_values(n, &mut rng);
    let y = random_values(n, &mut rng);
    let cx = encrypt_values(&p, &sk, &x, max_level, &mut rng).map_err(err)?;
    let cy = encrypt_values(&p, &sk, &y, max_level, &mut rng).map_err(err)?;
    let prod: Vec<_> = x.iter().zip(&y).map(|(a, b)| a * b).collect();
    let m = ev.mult(&cx, &cy).map_err(err)?;
    r.mult = relative(&decrypt_values(&p, &sk, &m), &prod);
    let rotated = |k: i64| (0..n).map(|i| x[(i as i64 - k).rem_euclid(n as i64) as usize]).collect::<Vec<_>>();
    for &k in &shifts {
        let c = ev.rotate(&cx, k).map_err(err)?;
        r.rotate = r.rotate.max(relative(&decrypt_values(&p, &sk, &c), &rotated(k)));
    }
    let hs = ev.hrotate(&cx, &shifts).map_err(err)?;
    for (h, &k) in hs.iter().zip(&shifts) {
        r.hrotate = r.hrotate.max(relative(&decrypt_values(&p, &sk, h), &rotated(k)));
        r.hrotate_identical &= *h == ev.rotate(&cx, k).map_err(err)?;
    }
    let conj: Vec<_> = x.iter().map(|z| z.conj()).collect();
    r.conjugate = relative(&decrypt_values(&p, &sk, &ev.conjugate(&cx).map_err(err)?), &conj);

    r.compressed_identical = ev.mult(&cx, &cy).map_err(err)? == evc.mult(&cx, &cy).map_err(err)?
        && ev.conjugate(&cx).map_err(err)? == evc.conjugate(&cx).map_err(err)?
        && hs == evc.hrotate(&cx, &shifts).map_err(err)?
        && shifts.iter().all(|&k| ev.rotate(&cx, k).ok() == evc.rotate(&cx, k).ok());

    for _ in 0..instances {
        let level = rng.gen_range(1..=max_level);
        let a = encrypt_values(&p, &sk, &random_values(n, &mut rng), level, &mut rng).map_err(err)?;
        let b = encrypt_values(&p, &sk, &random_values(n, &mut rng), level, &mut rng).map_err(err)?;
        let m = decrypt_values(&p, &sk, &ev.mult(&a, &b).map_err(err)?);
        let nm = decrypt_values(&p, &sk, &ev.new_mult(&a, &b).map_err(err)?);
        r.new_mult_gap = r.new_mult_gap.max(max_error(&m, &nm));
    }
    Ok(r)
}

fn functional_check() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (log_n, instances) in [(12, 100), (13, 100)] {
        let r = functional(log_n, instances, 40 + log_n as u64)?;
        ok &= r.passed();
        parts.push(format!(
            "N=2^{}: roundtrip 2^{:.1}, ops 2^{:.1}, new_mult gap 2^{:.1}, identical {}",
            log_n,
            r.roundtrip.log2(),
            [r.mult, r.rotate, r.hrotate, r.conjugate].iter().fold(0.0f64, |a, &b| a.max(b)).log2(),
            r.new_mult_gap.log2(),
            r.hrotate_identical && r.compressed_identical
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn toy_boot() -> Result<(CkksParams, crate::bootstrap::BootConfig), String> {
    let preset = Presets::load().map_err(err)?.ckks("toy-boot").map_err(err)?.clone();
    let config = preset.boot_config().ok_or("toy-boot has no sine section")?;
    Ok((CkksParams::new(preset.spec).map_err(err)?, config))
}

fn bootstrap_check() -> Outcome {
    let (p, config) = toy_boot()?;
    let boot = crate::bootstrap::Bootstrapper::new(&p, config).map_err(err)?;
    let req = boot.key_request(&KeyRequest { compressed: true, ..Default::default() });
    let (sk, keys) = keygen(&p, 8, &req);
    let ev = Evaluator::new(&p, &keys);
    let mut rng = ChaCha20Rng::seed_from_u64(9);
    let x = random_values(p.slots(), &mut rng);
    let ct = encrypt_values(&p, &sk, &x, 0, &mut rng).map_err(err)?;
    let out = boot.bootstrap(&ev, &ct).map_err(err)?;
    let e = max_error(&decrypt_values(&p, &sk, &out), &x);
    Ok((
        out.level() > ct.level() && e < 2f64.powi(-8),
        format!("level {} -> {}, max error 2^{:.1}", ct.level(), out.level(), e.log2()),
    ))
}

fn lr_check() -> Outcome {
    let (p, config) = toy_boot()?;
    let report = run_demo(&p, config, &DemoConfig::default(), None).map_err(err)?;
    let e = report.max_weight_error();
    let presets = Presets::load().map_err(err)?;
    let t = Targets::load().map_err(err)?;
    let (rows, devs) = optimized_rows(presets.cost("best-case").map_err(err)?, &t).map_err(err)?;
    let lr_devs: Vec<_> = devs.iter().filter(|d| d.name == "LrIteration").collect();
    let row = rows.iter().find(|r| r.name == "LrIteration").ok_or("no LrIteration row")?;
    let ok = report.iterations.len() == 6
        && report.bootstraps == 2
        && e < 2f64.powi(-6)
        && !lr_devs.is_empty()
        && lr_devs.iter().all(|d| d.within);
    Ok((
        ok,
        format!(
            "{} iterations, {} bootstraps, weight error 2^{:.1}; model {:.2} GOP / {:.2} GB / AI {:.2}",
            report.iterations.len(),
            report.bootstraps,
            e.log2(),
            row.gop,
            row.gb,
            row.ai
        ),
    ))
}

fn oracle_check() -> Outcome {
    let modular = modular_arithmetic_mismatches(1_000_000, 1);
    let ntt = ntt_convolution_mismatches(300, 2);
    let conv = basis_conversion_worst(200, 3);
    let down = mod_down_worst(120, 4);
    let ok = modular == 0 && ntt == 0 && conv.is_some() && down <= MOD_DOWN_BOUND;
    Ok((
        ok,
        format!(
            "modular mismatches {modular}, NTT mismatches {ntt}, conversion |u| max {}, ModDown error max {down}",
            conv.map_or("out of bound".to_string(), |u| u.to_string())
        ),
    ))
}

fn oracle_moduli() -> Vec<Modulus> {
    let mut out: Vec<Modulus> =
        [20u32, 31, 40, 50, 59, 61, 62].iter().filter_map(|&b| gen_ntt_prime(b, 16, &[]).ok()).collect();
    out.push(Modulus::new((1 << 61) - 1));
    out.push(Modulus::new(3));
    out
}

/// Modular add, sub, mul, Shoup mul, Barrett and signed reduction against
/// u128; pow against big integers; inverses by multiplication.
pub fn modular_arithmetic_mismatches(cases: usize, seed: u64) -> usize {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let ms = oracle_moduli();
    let mut bad = 0;
    for i in 0..cases {
        let m = &ms[i % ms.len()];
        let q = m.value();
        let q128 = q as u128;
        let (x, y) = (rng.gen_range(0..q), rng.gen_range(0..q));
        // Barrett input range: anything below q * 2^64.
        let w = ((rng.gen::<u64>() % q) as u128) << 64 | rng.gen::<u64>() as u128;
        let s: i128 = rng.gen();
        bad += (m.add(x, y) as u128 != (x as u128 + y as u128) % q128) as usize;
        bad += (m.sub(x, y) as u128 != (x as u128 + q128 - y as u128) % q128) as usize;
        bad += (m.mul(x, y) as u128 != (x as u128 * y as u128) % q128) as usize;
        bad += (m.mul_shoup(x, &m.shoup(y)) as u128 != (x as u128 * y as u128) % q128) as usize;
        bad += (m.reduce_u128(w) as u128 != w % q128) as usize;
        bad += (m.reduce(w as u64) as u128 != (w as u64 as u128) % q128) as usize;
        bad += (m.reduce_i128(s) as i128 != s.rem_euclid(q as i128)) as usize;
        if i % 64 == 0 {
            let e: u64 = rng.gen();
            let want = BigUint::from(x).modpow(&BigUint::from(e), &BigUint::from(q));
            bad += (BigUint::from(m.pow(x, e)) != want) as usize;
            if x != 0 && is_prime(q) {
                bad += (m.mul(m.inv(x), x) != 1) as usize;
            }
        }
    }
    bad
}

fn negacyclic(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
    let n = a.len();
    let q = q as u128;
    let mut out = vec![0u128; n];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            let p = ai as u128 * bj as u128 % q;
            let k = (i + j) % n;
            out[k] = if i + j < n { (out[k] + p) % q } else { (out[k] + q - p) % q };
        }
    }
    out.into_iter().map(|x| x as u64).collect()
}

/// NTT products and round trips at N = 8 that differ from schoolbook
/// negacyclic convolution.
pub fn ntt_convolution_mismatches(trials: usize, seed: u64) -> usize {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let n = 8;
    let mut bad = 0;
    for bits in [20u32, 40, 61] {
        let Some(table) = gen_ntt_prime(bits, n, &[]).ok().and_then(|m| NttTable::new(m, n).ok()) else {
            return usize::MAX;
        };
        let m = table.modulus();
        let q = m.value();
        for _ in 0..trials {
            let a: Vec<u64> = (0..n).map(|_| rng.gen_range(0..q)).collect();
            let b: Vec<u64> = (0..n).map(|_| rng.gen_range(0..q)).collect();
            let (mut fa, mut fb) = (a.clone(), b.clone());
            table.forward(&mut fa);
            table.forward(&mut fb);
            let mut prod: Vec<u64> = fa.iter().zip(&fb).map(|(x, y)| m.mul(*x, *y)).collect();
            table.inverse(&mut prod);
            bad += (prod != negacyclic(&a, &b, q)) as usize;
            table.inverse(&mut fa);
            bad += (fa != a) as usize;
        }
    }
    bad
}

fn oracle_basis(n: usize, bits: u32, count: usize) -> RnsBasis {
    let primes = gen_ntt_primes(bits, n, count, &[]).expect("enough primes");
    RnsBasis::new(primes.into_iter().map(|m| Prime::new(m, n).expect("NTT-friendly")).collect(), 0)
}

fn product(b: &RnsBasis) -> BigInt {
    b.values().iter().fold(BigInt::one(), |acc, &q| acc * BigInt::from(q))
}

fn floor_mod(x: &BigInt, m: &BigInt) -> BigInt {
    ((x % m) + m) % m
}

fn centered(x: &BigInt, q: &BigInt) -> BigInt {
    let r = floor_mod(x, q);
    if &r * 2 > *q {
        r - q
    } else {
        r
    }
}

fn inverse_mod_prime(x: &BigInt, q: &BigInt) -> BigInt {
    floor_mod(x, q).modpow(&(q - 2), q)
}

/// CRT reconstruction of coefficient k in [0, Q).
fn crt(p: &RnsPoly, k: usize) -> BigInt {
    let b = p.basis();
    let q = product(b);
    let mut x = BigInt::zero();
    for i in 0..b.len() {
        let qi = BigInt::from(b.modulus(i).value());
        let hat = &q / &qi;
        x += BigInt::from(p.limb(i)[k]) * inverse_mod_prime(&hat, &qi) * hat;
    }
    floor_mod(&x, &q)
}

fn random_poly(b: &RnsBasis, n: usize, rng: &mut impl Rng) -> RnsPoly {
    let mut data = Vec::with_capacity(b.len() * n);
    for i in 0..b.len() {
        let q = b.modulus(i).value();
        data.extend((0..n).map(|_| rng.gen_range(0..q)));
    }
    RnsPoly::from_limbs(b, n, Rep::Coeff, data)
}

/// Largest |u| over conversions y = x + u Q_S, or None when an output is
/// not of that form for one u shared by every target prime, or when
/// |u| > (|S| + 1) / 2.
pub fn basis_conversion_worst(trials: usize, seed: u64) -> Option<i64> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let n = 16;
    let all = oracle_basis(n, 45, 7);
    let mut worst = 0;
    for t in 0..trials {
        let s = 1 + t % 4;
        let src = all.slice(0..s);
        let dst = all.slice(s..all.len());
        let p = random_poly(&src, n, &mut rng);
        let out = basis_convert(&p, &dst).ok()?;
        let qs = product(&src);
        for k in 0..n {
            let x = crt(&p, k);
            let mut shared: Option<BigInt> = None;
            for j in 0..dst.len() {
                let tj = BigInt::from(dst.modulus(j).value());
                let diff = floor_mod(&(BigInt::from(out.limb(j)[k]) - &x), &tj);
                let u = centered(&(diff * inverse_mod_prime(&qs, &tj)), &tj);
                if shared.as_ref().is_some_and(|v| *v != u) {
                    return None;
                }
                shared = Some(u);
            }
            let u = shared?.abs().to_i64()?;
            if u > (s as i64 + 1) / 2 {
                return None;
            }
            worst = worst.max(u);
        }
    }
    Some(worst)
}

/// ModDown by up to three primes may be off from round(x / P) by the
/// conversion multiple of the dropped part plus one for rounding.
pub const MOD_DOWN_BOUND: i64 = 3;

/// Largest distance between ModDown (Rescale for single drops on even
/// trials) and round(x / P) over centered representatives.
pub fn mod_down_worst(trials: usize, seed: u64) -> i64 {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let n = 16;
    let all = oracle_basis(n, 45, 6);
    let mut worst = 0;
    for t in 0..trials {
        let drop = 1 + t % 3;
        let p = random_poly(&all, n, &mut rng);
        let Ok(eval) = p.clone().ntt() else { return i64::MAX };
        let got = if drop == 1 && t % 2 == 0 { rescale(&eval) } else { mod_down(&eval, drop) };
        let Ok(got) = got.and_then(|g| g.intt()) else { return i64::MAX };
        let keep = all.len() - drop;
        let q = product(&all.slice(0..keep));
        let pp = product(&all.slice(keep..all.len()));
        let total = &q * &pp;
        for k in 0..n {
            let x = centered(&crt(&p, k), &total);
            // Ties round away from zero.
            let twice = &x * 2 + if x.is_negative() { -&pp } else { pp.clone() };
            let want = twice / (&pp * 2);
            let diff = centered(&(crt(&got, k) - want), &q);
            worst = worst.max(diff.abs().to_i64().unwrap_or(i64::MAX));
        }
    }
    worst
}

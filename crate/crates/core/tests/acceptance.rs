//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use logbesov::criteria::{nece_term2, nece_term3, suff_term2, suff_term3};
use logbesov::experiments::{fit_line, run_charfun, run_exp_growth, ExperimentConfig, GrowthTable};
use logbesov::gallery::{make_bump, make_exponential, random_band_limited, BumpSpec};
use logbesov::norms::{besov_norm, dini_norm, modulus, BesovParams};
use logbesov::paraproduct::{diagonal_term, paraproducts};
use logbesov::partition::energy_outside;
use logbesov::{
    check_partition, lp_norm, DyadicPartition, GridSpec, LpExponent, PartitionKind, SpectralDecomposition,
};

type Outcome = Result<(bool, String), String>;

struct Criterion {
    id: usize,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn radial(dim: usize, j: u32) -> DyadicPartition {
    DyadicPartition::build(GridSpec::new(dim, j).unwrap(), PartitionKind::Radial)
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn partition_exactness() -> Outcome {
    let check = check_partition(&radial(1, 14));
    Ok((
        check.passes(),
        format!("telescoping {:.1e}, leakage {:.1e}", check.telescoping_error, check.leakage),
    ))
}

fn delta_selection() -> Outcome {
    let part = radial(1, 14);
    let mut worst = 0.0f64;
    for m in 2..part.k_max() {
        let f = make_exponential(part.grid(), [1 << m, 0]).map_err(err)?;
        let d = SpectralDecomposition::new(&f, &part).map_err(err)?;
        for (j, piece) in d.pieces().iter().enumerate() {
            let e = if j == m { piece.sub(&f).map_err(err)?.max_abs() } else { piece.max_abs() };
            worst = worst.max(e);
        }
    }
    Ok((worst < 1e-10, format!("max deviation {worst:.1e}")))
}

fn bump_decay() -> Outcome {
    const LEVEL: usize = 9;
    let part = radial(1, 14);
    let h = make_bump(part.grid(), BumpSpec::on_cube(LEVEL, [0, 0])).map_err(err)?;
    let d = SpectralDecomposition::new(&h, &part).map_err(err)?;
    let mut ok = true;
    let mut notes = Vec::new();
    for p in [LpExponent::ONE, LpExponent::TWO, LpExponent::Inf] {
        let logs: Vec<f64> =
            d.pieces().iter().map(|s| lp_norm(s, p).map(f64::log2)).collect::<Result<_, _>>().map_err(err)?;
        let below_expected = 2.0 - p.reciprocal();
        let slope = |lo: usize, hi: usize| -> Result<f64, String> {
            let xs: Vec<f64> = (lo..=hi).map(|j| j as f64).collect();
            Ok(fit_line(&xs, &logs[lo..=hi]).map_err(err)?.slope)
        };
        let below = slope(1, LEVEL - 1)?;
        let above = slope(LEVEL, part.k_max())?;
        let pass = (below - below_expected).abs() <= 0.15 && (above + 1.0).abs() <= 0.15;
        ok &= pass;
        notes.push(format!("p={p}: {below:.2} (want {below_expected:.2}) / {above:.2} (want -1)"));
    }
    Ok((ok, notes.join("; ")))
}

fn growth_summary(table: &GrowthTable) -> String {
    table
        .fits
        .iter()
        .map(|f| format!("b={}: {:.3} vs {}{}", f.b, f.fitted_exponent, f.predicted_exponent, if f.pass { "" } else { " x" }))
        .collect::<Vec<_>>()
        .join(", ")
}

fn growth(p: LpExponent, b_list: &[f64]) -> Outcome {
    let mut config = ExperimentConfig::desk("exp-growth");
    config.p_list = vec![p];
    config.b_list = b_list.to_vec();
    let table = run_exp_growth(&config).map_err(err)?;
    Ok((table.all_pass() && table.fits.len() == b_list.len(), growth_summary(&table)))
}

fn growth_p1() -> Outcome {
    growth(LpExponent::ONE, &[-2.0, -1.0, 0.0, 0.5, 1.0, 2.0])
}

fn growth_pinf() -> Outcome {
    growth(LpExponent::Inf, &[-2.0, -1.0, 0.0, 0.5, 1.0, 2.0])
}

fn growth_p4() -> Outcome {
    growth(LpExponent::finite(4.0).map_err(err)?, &[0.0, 2.0, -1.0])
}

fn charfun() -> Outcome {
    let table = run_charfun(&ExperimentConfig::desk("charfun")).map_err(err)?;
    let s = table.summaries.first().ok_or("no summary")?;
    Ok((
        table.all_pass(),
        format!("flat slope {:.4}, contrast ratio {:.3}", s.flat_slope, s.contrast_ratio),
    ))
}

fn ordering() -> Outcome {
    let part = radial(1, 11);
    let ps = [1.0, 1.5, 2.0, 3.0, 4.0];
    let bs = [-2.0, -1.0, 0.0, 0.5, 1.0, 2.0];
    let mut violations = 0;
    for i in 0..50u64 {
        let f = random_band_limited(part.grid(), 8 + 8 * (i as i64 % 8), 1.0, 1000 + i).map_err(err)?;
        let p = LpExponent::finite(ps[i as usize % ps.len()]).map_err(err)?;
        let b = bs[i as usize % bs.len()];
        let n2 = nece_term2(&f, &part, p, b).map_err(err)?.value;
        let s2 = suff_term2(&f, &part, p, b).map_err(err)?.value;
        let n3 = nece_term3(&f, &part, p, b).map_err(err)?.value;
        let s3 = suff_term3(&f, &part, p, b).map_err(err)?.value;
        violations += usize::from(n2 > s2) + usize::from(n3 > s3);
    }
    Ok((violations == 0, format!("{violations} violations over 50 fields")))
}

fn paraproduct_completeness() -> Outcome {
    let part = radial(1, 12);
    let band = 1i64 << (part.k_max() - 3);
    let (mut residual, mut leak) = (0.0f64, 0.0f64);
    for i in 0..20u64 {
        let f = random_band_limited(part.grid(), band - 1, 0.0, 2 * i).map_err(err)?;
        let g = random_band_limited(part.grid(), band - 1, 0.0, 2 * i + 1).map_err(err)?;
        residual = residual.max(paraproducts(&f, &g, &part).map_err(err)?.residual);
        for k in 0..=part.k_max() {
            let t = diagonal_term(&f, &g, &part, k).map_err(err)?;
            leak = leak.max(energy_outside(&t, 0.0, 5.0 * (k as f64).exp2()));
        }
    }
    Ok((residual < 1e-8 && leak < 1e-10, format!("residual {residual:.1e}, envelope leakage {leak:.1e}")))
}

/// Definition of the norm evaluated from scratch: direct DFT, symbols from
/// the transition formula, Riemann sums.
mod oracle {
    use super::PI;
    use num_complex::Complex64;

    fn transition(r: f64) -> f64 {
        let g = |t: f64| if t > 0.0 { (-1.0 / t).exp() } else { 0.0 };
        let (a, b) = (g(3.0 - 2.0 * r), g(2.0 * r - 2.0));
        a / (a + b)
    }

    fn symbol(k: usize, xi: f64) -> f64 {
        let base = |c: f64| transition((xi * c).abs());
        if k == 0 {
            base(1.0)
        } else {
            base((-(k as f64)).exp2()) - base((1.0 - k as f64).exp2())
        }
    }

    pub fn besov(values: &[Complex64], s: f64, b: f64, p: Option<f64>, q: Option<f64>) -> f64 {
        let n = values.len();
        let h = 2.0 * PI / n as f64;
        let x = |i: usize| -PI + i as f64 * h;
        let freqs: Vec<i64> = (0..n as i64).map(|i| i - n as i64 / 2).collect();
        let coeff: Vec<Complex64> = freqs
            .iter()
            .map(|&m| {
                values.iter().enumerate().map(|(i, v)| v * Complex64::from_polar(1.0, -(m as f64) * x(i))).sum::<Complex64>()
                    / n as f64
            })
            .collect();
        let k_max = n.trailing_zeros() as usize - 2;
        let mut terms = Vec::new();
        for k in 0..=k_max {
            let piece: Vec<f64> = (0..n)
                .map(|i| {
                    freqs
                        .iter()
                        .zip(&coeff)
                        .map(|(&m, c)| c * symbol(k, m as f64) * Complex64::from_polar(1.0, m as f64 * x(i)))
                        .sum::<Complex64>()
                        .norm()
                })
                .collect();
            let norm = match p {
                None => piece.iter().cloned().fold(0.0, f64::max),
                Some(p) => (piece.iter().map(|v| v.powf(p)).sum::<f64>() * h).powf(1.0 / p),
            };
            terms.push((k as f64 * s).exp2() * (1.0 + k as f64).powf(b) * norm);
        }
        match q {
            None => terms.iter().cloned().fold(0.0, f64::max),
            Some(q) => terms.iter().map(|t| t.powf(q)).sum::<f64>().powf(1.0 / q),
        }
    }
}

fn norm_oracle() -> Outcome {
    let part = radial(1, 7);
    let exps = [Some(1.0), Some(2.0), None];
    let to_exp = |e: Option<f64>| e.map_or(LpExponent::Inf, |v| LpExponent::finite(v).unwrap());
    let mut worst = 0.0f64;
    for i in 0..20usize {
        let f = random_band_limited(part.grid(), 64, 0.5, 77 + i as u64).map_err(err)?;
        let (p, q) = (exps[i % 3], exps[(i / 3) % 3]);
        let s = [-1.0, 0.0, 1.0][(i / 9 + i) % 3];
        let b = [-1.0, 0.0, 1.0][(i / 3 + 2 * i) % 3];
        let ours = besov_norm(&f, &part, BesovParams::new(s, b, to_exp(p), to_exp(q))).map_err(err)?.value;
        let theirs = oracle::besov(f.values(), s, b, p, q);
        worst = worst.max((ours - theirs).abs() / theirs);
    }
    Ok((worst < 1e-12, format!("max relative deviation {worst:.1e}")))
}

fn modulus_closed_form() -> Outcome {
    let g = GridSpec::new(1, 12).map_err(err)?;
    let f = make_exponential(g, [1, 0]).map_err(err)?;
    let mut worst = 0.0f64;
    let finest = dini_lower_scale(g);
    for j in 0.. {
        let t = (-(j as f64)).exp2();
        if t < finest {
            break;
        }
        let w = modulus(&f, 1, t, LpExponent::Inf).map_err(err)?;
        worst = worst.max((w - 2.0 * (t / 2.0).sin()).abs());
    }
    let dini = dini_norm(&f).map_err(err)?.value;
    let lo = dini_lower_scale(g);
    let steps = 200_000;
    let (a, c) = (lo.ln(), 0.5f64.ln());
    let du = (c - a) / steps as f64;
    // midpoint rule in u = ln t for ∫ 2 sin(t/2) dt / t
    let fine: f64 = (0..steps).map(|i| 2.0 * ((a + (i as f64 + 0.5) * du).exp() / 2.0).sin() * du).sum();
    let rel = (dini - fine).abs() / fine;
    Ok((
        worst < 1e-6 && rel < 0.05,
        format!("modulus deviation {worst:.1e}, Dini {dini:.4} vs quadrature {fine:.4}"),
    ))
}

/// Finest dyadic scale used by the Dini functional: two grid cells.
fn dini_lower_scale(g: GridSpec) -> f64 {
    (-(1.0 / (2.0 * g.spacing())).log2().floor()).exp2()
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, name: "partition exactness", budget: Duration::from_secs(1), run: partition_exactness },
        Criterion { id: 2, name: "single-level selection of exponentials", budget: Duration::from_secs(5), run: delta_selection },
        Criterion { id: 3, name: "bump projection decay", budget: Duration::from_secs(30), run: bump_decay },
        Criterion { id: 4, name: "exponential growth, p=1", budget: Duration::from_secs(120), run: growth_p1 },
        Criterion { id: 5, name: "exponential growth, p=inf", budget: Duration::from_secs(120), run: growth_pinf },
        Criterion { id: 6, name: "packet lower bounds, p=4", budget: Duration::from_secs(180), run: growth_p4 },
        Criterion { id: 7, name: "characteristic functions", budget: Duration::from_secs(30), run: charfun },
        Criterion { id: 8, name: "necessity below sufficiency", budget: Duration::from_secs(120), run: ordering },
        Criterion { id: 9, name: "paraproduct completeness", budget: Duration::from_secs(60), run: paraproduct_completeness },
        Criterion { id: 10, name: "norm against brute force", budget: Duration::from_secs(60), run: norm_oracle },
        Criterion { id: 11, name: "modulus closed form", budget: Duration::from_secs(60), run: modulus_closed_form },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok((ok, detail)) => (ok && elapsed <= c.budget, detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{} criterion {:>2} {} ({:.2}s of {}s): {}",
            if ok { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            elapsed.as_secs_f64(),
            c.budget.as_secs(),
            detail
        );
    }
    println!("{}/{} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

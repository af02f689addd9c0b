use std::fmt::Write as _;
use std::path::Path;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use serde_json::{json, Value};

use padic_wavelet::io::{
    expansion_from_json, expansion_to_json, fmt_float, function_from_json, function_to_json, value_record,
    wavelet_table_csv, wavelet_table_record,
};
use padic_wavelet::function_space::cell_count;
use padic_wavelet::padic::{padic_from_big_rational, parse_rational};
use padic_wavelet::real_side::{expand_monomial, haar_evaluate, kozyrev_to_haar, monna_pushforward};
use padic_wavelet::spectral::{
    check_on_basis, check_translation_commutes, deformed_relations, semigroup_relation, sl2_relations,
    witt_relations, RelationInstance,
};
use padic_wavelet::{
    analyze, evaluate, materialize, synthesize, BasisOperator, Exponent, HaarIndex, KozyrevIndex, LocallyConstantFn,
    PAdicNumber, Scalar, WaveletExpansion, Window,
};

use crate::output::{digits_text, emit, expansion_csv, function_csv, value_columns, VALUE_HEADER};
use crate::{CheckCommand, CliError, Command, Format, HaarCommand, Relation, RunConfig, WaveletCommand};

type Out = Result<(), CliError>;

pub fn dispatch<S: Scalar>(cfg: &RunConfig, cmd: Command) -> Out {
    match cmd {
        Command::Wavelet(WaveletCommand::Table { index, all }) => wavelet_table::<S>(cfg, &index, all),
        Command::Wavelet(WaveletCommand::Eval { index, point }) => wavelet_eval::<S>(cfg, &index, &point),
        Command::Analyze { input } => analyze_cmd::<S>(cfg, &input),
        Command::Synthesize { input, resolution } => synthesize_cmd::<S>(cfg, &input, resolution),
        Command::Fourier { input, inverse } => fourier_cmd::<S>(cfg, &input, inverse),
        Command::Check(CheckCommand::Algebra { relation, alpha, beta, range, corrupt }) => {
            check_algebra::<S>(cfg, relation, &alpha, &beta, range, corrupt)
        }
        Command::ExpandMonomial { degree, levels } => expand_monomial_cmd::<S>(cfg, degree, levels),
        Command::Haar(HaarCommand::Sample { level, translate, points }) => haar_sample::<S>(cfg, level, translate, points),
        Command::MonnaMap { index, point } => match (index, point) {
            (Some(i), _) => monna_index::<S>(cfg, &i),
            (None, Some(x)) => monna_point(cfg, &x),
            (None, None) => Err(CliError::Usage("give --index or --point".into())),
        },
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialize")
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// `N:M:J`, with the digits of `m` separated by dots.
fn parse_index(p: u64, s: &str) -> Result<KozyrevIndex, CliError> {
    let bad = |why: &str| usage(format!("index {s:?}: {why} (expected N:M:J, e.g. -1:2.1:1 or 0::1)"));
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(bad("need three fields"));
    }
    let n: i64 = parts[0].trim().parse().map_err(|_| bad("N is not an integer"))?;
    let m: Vec<u64> = if parts[1].trim().is_empty() {
        Vec::new()
    } else {
        parts[1].split('.').map(|d| d.trim().parse::<u64>()).collect::<Result<_, _>>().map_err(|_| bad("bad digit in M"))?
    };
    let j: u64 = parts[2].trim().parse().map_err(|_| bad("J is not an integer"))?;
    let idx = KozyrevIndex::new(n, &m, j);
    idx.validate(p).map_err(|e| usage(format!("index {s:?}: {e}")))?;
    Ok(idx)
}

/// p-adic text, or a rational expanded to `--precision` digits.
fn parse_point(cfg: &RunConfig, s: &str) -> Result<PAdicNumber, CliError> {
    let p = cfg.prime;
    let x = if s.contains('~') || s.contains('*') {
        s.parse::<PAdicNumber>()?
    } else {
        let q = parse_rational(s)?;
        padic_from_big_rational(&q, p, cfg.precision)?
    };
    if x.prime() != p {
        return Err(usage(format!("point {s:?} is {}-adic but --prime is {p}", x.prime())));
    }
    Ok(x)
}

fn wavelet_table<S: Scalar>(cfg: &RunConfig, index: &[String], all: bool) -> Out {
    let p = cfg.prime;
    let indices = if all {
        cfg.window.unwrap_or(Window { n_min: -2, n_max: 2, max_depth: 1 }).indices(p)?
    } else {
        let parsed = index.iter().map(|s| parse_index(p, s)).collect::<Result<Vec<_>, _>>()?;
        if let Some(w) = cfg.window {
            if let Some(idx) = parsed.iter().find(|i| !w.contains(i)) {
                return Err(usage(format!("index {idx} is outside the window")));
            }
        }
        parsed
    };
    let tables = indices
        .into_iter()
        .map(|idx| {
            // the cap bounds each table's frame, not just its p stored cells
            let (m, k) = idx.frame();
            cell_count(p, m, k)?;
            materialize::<S>(p, &idx, 0).map(|f| (idx, f))
        })
        .collect::<padic_wavelet::Result<Vec<_>>>()?;
    let text = match cfg.format {
        Format::Csv => wavelet_table_csv(&tables),
        Format::Json => {
            let records: Vec<_> = tables.iter().map(|(i, f)| wavelet_table_record(i, f)).collect();
            pretty(&json!({ "prime": p, "tables": records }))
        }
    };
    emit(cfg, &text)
}

fn wavelet_eval<S: Scalar>(cfg: &RunConfig, index: &str, point: &str) -> Out {
    let idx = parse_index(cfg.prime, index)?;
    let xi = parse_point(cfg, point)?;
    let v = evaluate::<S>(cfg.prime, &idx, &xi)?;
    let text = match cfg.format {
        Format::Csv => {
            format!("index,point,{VALUE_HEADER}\n{},{},{}\n", csv_field(&idx.to_string()), csv_field(&xi.to_string()), value_columns(&v))
        }
        Format::Json => pretty(&json!({ "index": idx.to_string(), "point": xi.to_string(), "value": value_record(&v) })),
    };
    emit(cfg, &text)
}

fn emit_function<S: Scalar>(cfg: &RunConfig, f: &LocallyConstantFn<S>) -> Out {
    let text = match cfg.format {
        Format::Csv => function_csv(f),
        Format::Json => function_to_json(f),
    };
    emit(cfg, &text)
}

fn emit_expansion<S: Scalar>(cfg: &RunConfig, e: &WaveletExpansion<S>) -> Out {
    let text = match cfg.format {
        Format::Csv => expansion_csv(e),
        Format::Json => expansion_to_json(e),
    };
    emit(cfg, &text)
}

fn norm(f: &LocallyConstantFn<impl Scalar>) -> f64 {
    f.norm_sqr().to_complex().re.max(0.0).sqrt()
}

/// Writes the expansion, then reports the round trip on standard error: the
/// residual `f − synthesize(analyze(f))` must equal the mean component when
/// the window resolves the input frame.
fn analyze_cmd<S: Scalar>(cfg: &RunConfig, input: &Path) -> Out {
    let f = function_from_json::<S>(&read(input)?)?;
    cfg.check_file_prime(f.prime())?;
    let (m, k) = (f.support_exponent(), f.resolution_exponent());
    let resolving = Window::resolving(m, k)?;
    let window = cfg.window.unwrap_or(resolving);
    let e = analyze(&f, window)?;
    emit_expansion(cfg, &e)?;

    let back = synthesize(&e, k.max(1 - window.n_min))?;
    let residual = f.try_sub(&back)?;
    let mean = f.mean_component();
    let excess = residual.try_sub(&mean)?;
    eprintln!("coefficients: {}", e.len());
    eprintln!("mean component norm: {}", fmt_float(norm(&mean)));
    eprintln!("round trip residual norm: {}", fmt_float(norm(&residual)));
    let covers = window.n_min <= resolving.n_min
        && window.n_max >= resolving.n_max
        && window.max_depth >= resolving.max_depth;
    if covers {
        let off = norm(&excess);
        eprintln!("residual minus mean component: {}", fmt_float(off));
        if !excess.pruned(cfg.tol()).is_zero() {
            return Err(CliError::Numeric(format!("round trip residual differs from the mean component by {off:e}")));
        }
    } else {
        eprintln!("window does not resolve frame ({m}, {k}); residual includes clipped scales");
    }
    Ok(())
}

fn synthesize_cmd<S: Scalar>(cfg: &RunConfig, input: &Path, resolution: Option<i64>) -> Out {
    let e = expansion_from_json::<S>(&read(input)?)?;
    cfg.check_file_prime(e.prime())?;
    let k = resolution.unwrap_or(1 - e.window().n_min);
    emit_function(cfg, &synthesize(&e, k)?)
}

fn fourier_cmd<S: Scalar>(cfg: &RunConfig, input: &Path, inverse: bool) -> Out {
    let f = function_from_json::<S>(&read(input)?)?;
    cfg.check_file_prime(f.prime())?;
    let g = if inverse { f.inverse_fourier()? } else { f.fourier()? };
    emit_function(cfg, &g)
}

fn parse_exponent(name: &str, s: &str) -> Result<Exponent, CliError> {
    Exponent::parse(s).ok_or_else(|| usage(format!("--{name} {s:?} is not a number")))
}

struct CheckRow {
    relation: String,
    checked: usize,
    max_residual: f64,
    first_failure: Option<String>,
}

fn relation_rows<S: Scalar>(
    cfg: &RunConfig,
    window: Window,
    rels: Vec<RelationInstance<S>>,
    corrupt: bool,
) -> Result<Vec<CheckRow>, CliError> {
    let mut rows = Vec::new();
    for mut rel in rels {
        if corrupt {
            rel.combination = rel.combination.plus(S::one(), BasisOperator::identity());
            rel.label.push_str(" + 1");
        }
        let r = check_on_basis(cfg.prime, window, &rel, cfg.tol())?;
        if r.checked == 0 {
            return Err(usage(format!(
                "window [{}, {}] has no interior vectors for {} (reach {})",
                window.n_min,
                window.n_max,
                rel.label,
                rel.combination.reach()
            )));
        }
        rows.push(CheckRow {
            relation: r.label,
            checked: r.checked,
            max_residual: r.max_residual,
            first_failure: r.first_failure,
        });
    }
    Ok(rows)
}

/// `D^α T_b − T_b D^α` on every basis vector, for `b` of fractional depth 1:
/// every leading digit with a zero tail, and seeded random tails.
fn translation_rows<S: Scalar>(cfg: &RunConfig, window: Window, alpha: &Exponent, corrupt: bool) -> Result<Vec<CheckRow>, CliError> {
    let p = cfg.prime;
    // m + p^n b needs depth up to 1 − n
    let wide = Window { max_depth: window.max_depth.max((1 - window.n_min).max(0) as u32), ..window };
    let len = (2 - window.n_min).max(2) as usize + 2;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut shifts = Vec::new();
    for b0 in 1..p {
        let mut digits = vec![0; len];
        digits[0] = b0;
        shifts.push(PAdicNumber::from_digits(p, -1, &digits)?);
        for _ in 0..2 {
            let tail: Vec<u64> = (0..len).map(|i| if i == 0 { b0 } else { rng.gen_range(0..p) }).collect();
            shifts.push(PAdicNumber::from_digits(p, -1, &tail)?);
        }
    }
    let mut row = CheckRow {
        relation: format!("D^a T_b - T_b D^a, a = {alpha}{}", if corrupt { " + 1" } else { "" }),
        checked: 0,
        max_residual: 0.0,
        first_failure: None,
    };
    for idx in window.indices(p)? {
        let e = WaveletExpansion::<S>::unit(p, wide, idx.clone())?;
        for b in &shifts {
            let mut r = check_translation_commutes(alpha, b, &e)?;
            if corrupt {
                r = r.try_add(&e)?;
            }
            row.checked += 1;
            row.max_residual = row.max_residual.max(r.max_abs());
            if row.first_failure.is_none() && !r.vanishes(cfg.tol()) {
                row.first_failure = Some(format!("{} at {idx}, b = {b}", row.relation));
            }
        }
    }
    Ok(vec![row])
}

fn check_algebra<S: Scalar>(cfg: &RunConfig, relation: Relation, alpha: &str, beta: &str, range: i64, corrupt: bool) -> Out {
    let p = cfg.prime;
    let alpha = parse_exponent("alpha", alpha)?;
    let beta = parse_exponent("beta", beta)?;
    if range < 0 {
        return Err(usage("--range must be non-negative"));
    }
    let default = match relation {
        // [ℓ_a, ℓ_b] moves n by up to 2·range; keep n ∈ [−4, 4] interior
        Relation::Witt => Window { n_min: -4 - 2 * range, n_max: 4 + 2 * range, max_depth: 1 },
        _ => Window { n_min: -4, n_max: 4, max_depth: 1 },
    };
    let window = cfg.window.unwrap_or(default);
    let rows = match relation {
        Relation::Sl2 => relation_rows::<S>(cfg, window, sl2_relations(), corrupt)?,
        Relation::Witt => relation_rows::<S>(cfg, window, witt_relations(range), corrupt)?,
        Relation::Deformed => relation_rows::<S>(cfg, window, deformed_relations(p, &alpha)?, corrupt)?,
        Relation::Semigroup => relation_rows::<S>(cfg, window, vec![semigroup_relation(&alpha, &beta)], corrupt)?,
        Relation::Translation => translation_rows::<S>(cfg, window, &alpha, corrupt)?,
    };
    let status = |r: &CheckRow| if r.first_failure.is_none() { "pass" } else { "FAIL" };
    let text = match cfg.format {
        Format::Csv => {
            let mut out = String::from("relation,checked,max_residual,status,first_failure\n");
            for r in &rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    csv_field(&r.relation),
                    r.checked,
                    fmt_float(r.max_residual),
                    status(r),
                    csv_field(r.first_failure.as_deref().unwrap_or(""))
                );
            }
            out
        }
        Format::Json => pretty(&Value::Array(
            rows.iter()
                .map(|r| {
                    json!({
                        "relation": r.relation,
                        "checked": r.checked,
                        "max_residual": r.max_residual,
                        "status": status(r),
                        "first_failure": r.first_failure,
                    })
                })
                .collect(),
        )),
    };
    emit(cfg, &text)?;
    match rows.iter().find_map(|r| r.first_failure.clone()) {
        Some(first) => Err(CliError::Numeric(format!("relation violated: {first}"))),
        None => Ok(()),
    }
}

fn expand_monomial_cmd<S: Scalar>(cfg: &RunConfig, degree: u32, levels: i64) -> Out {
    let p = cfg.prime;
    if levels < 0 {
        return Err(usage("--levels must be non-negative"));
    }
    let count = (0..levels).try_fold(0u128, |acc, l| (p as u128).checked_pow(l as u32).map(|c| acc + c));
    let cap = padic_wavelet::function_space::cell_cap();
    if count.is_none_or(|c| c > cap as u128) {
        return Err(CliError::Cap(format!("{levels} levels at p = {p} exceed the cap of {cap} coefficients")));
    }
    let e = expand_monomial::<S>(p, degree, levels, cfg.convention)?;
    let constant = S::from_rational(&e.constant);
    let text = match cfg.format {
        Format::Csv => {
            let mut out = format!("kind,level,translate,{VALUE_HEADER}\n");
            let _ = writeln!(out, "constant,,,{}", value_columns(&constant));
            for (idx, c) in &e.coefficients {
                let _ = writeln!(out, "coefficient,{},{},{}", idx.level, idx.translate, value_columns(c));
            }
            out
        }
        Format::Json => pretty(&json!({
            "prime": p,
            "degree": degree,
            "convention": format!("{:?}", cfg.convention).to_lowercase(),
            "constant": e.constant.to_string(),
            "coefficients": e.coefficients.iter().map(|(idx, c)| json!({
                "level": idx.level,
                "translate": idx.translate,
                "value": value_record(c),
            })).collect::<Vec<_>>(),
        })),
    };
    emit(cfg, &text)
}

fn haar_sample<S: Scalar>(cfg: &RunConfig, level: i64, translate: u64, points: u64) -> Out {
    let p = cfg.prime;
    let idx = HaarIndex::new(p, level, translate, cfg.convention)?;
    if points == 0 {
        return Err(usage("--points must be at least 1"));
    }
    let cap = padic_wavelet::function_space::cell_cap();
    if points > cap {
        return Err(CliError::Cap(format!("{points} points exceed the cap of {cap}")));
    }
    let xs: Vec<BigRational> =
        (0..points).map(|i| BigRational::new((2 * i + 1).into(), (2 * points).into())).collect();
    let values = xs.iter().map(|x| haar_evaluate::<S>(p, &idx, x)).collect::<padic_wavelet::Result<Vec<_>>>()?;
    let text = match cfg.format {
        Format::Csv => {
            let mut out = format!("x,x_float,{VALUE_HEADER}\n");
            for (x, v) in xs.iter().zip(&values) {
                let _ = writeln!(out, "{x},{},{}", fmt_float(rational_float(x)), value_columns(v));
            }
            out
        }
        Format::Json => pretty(&json!({
            "prime": p,
            "level": level,
            "translate": translate,
            "samples": xs.iter().zip(&values).map(|(x, v)| json!({ "x": x.to_string(), "value": value_record(v) })).collect::<Vec<_>>(),
        })),
    };
    emit(cfg, &text)
}

fn rational_float(q: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

fn monna_point(cfg: &RunConfig, point: &str) -> Out {
    let x = parse_point(cfg, point)?;
    let image = x.monna();
    let text = match cfg.format {
        Format::Csv => format!("point,image,image_float\n{},{image},{}\n", csv_field(&x.to_string()), fmt_float(rational_float(&image))),
        Format::Json => pretty(&json!({
            "point": x.to_string(),
            "image": image.to_string(),
            "image_float": rational_float(&image),
        })),
    };
    emit(cfg, &text)
}

fn monna_index<S: Scalar>(cfg: &RunConfig, index: &str) -> Out {
    let p = cfg.prime;
    let idx = parse_index(p, index)?;
    let f = monna_pushforward::<S>(p, &idx)?;
    let haar = kozyrev_to_haar(p, &idx).ok();
    let text = match cfg.format {
        Format::Csv => {
            let mut out = format!("a,b,{VALUE_HEADER}\n");
            for (a, b, v) in f.pieces() {
                let _ = writeln!(out, "{a},{b},{}", value_columns(v));
            }
            out
        }
        Format::Json => pretty(&json!({
            "index": idx.to_string(),
            "m_digits": digits_text(&idx.m_digits),
            "haar": haar.map(|(phase, h)| json!({
                "level": h.level,
                "translate": h.translate,
                "phase_num": phase.num(),
                "phase_den": phase.den(),
            })),
            "pieces": f.pieces().map(|(a, b, v)| json!({
                "a": a.to_string(),
                "b": b.to_string(),
                "value": value_record(v),
            })).collect::<Vec<_>>(),
        })),
    };
    emit(cfg, &text)
}

use nary_core::cohomology::class_coordinates;
use nary_core::kernel::format_rational;
use nary_core::nalg::SymmetryReport;
use nary_core::{
    bracket_skew_check, derived_series, fi_residual, gji_residual, h1, is_semisimple,
    jacobian_bracket, leibniz_rule_residual, lie_algebra_of, metric_checks, np_fi_residual,
    symmetry_audit, theorem1_cocycle, Action, Cochain, ComplexSpec, GlaTensor, NAryAlgebra,
    Polynomial, Rational, Symmetry,
};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::CliError;
use crate::format::{resolve, AlgebraFile, Loaded};
use crate::report::Report;
use crate::{ActionArg, Check, Cli, Command, NambuCheck, SymmetryArg};

/// Witness lists in reports are truncated to this many entries.
const MAX_WITNESSES: usize = 20;

pub struct Output {
    pub text: String,
    pub code: u8,
}

pub fn run(cli: &Cli) -> Result<Output, CliError> {
    let (report, pass) = match &cli.command {
        Command::Verify { input, checks } => verify(input, checks)?,
        Command::H1 {
            input,
            action,
            symmetry,
        } => cohomology(input, *action, *symmetry)?,
        Command::Structure { input } => structure(input)?,
        Command::Nambu {
            vars,
            fs,
            gs,
            check,
        } => nambu(vars, fs, gs, *check)?,
        Command::Export { input, output } => {
            let loaded = resolve(input)?;
            let text = AlgebraFile::from_algebra(&loaded.name, &loaded.algebra).to_json();
            match output {
                None => return Ok(Output { text, code: 0 }),
                Some(path) => {
                    std::fs::write(path, &text)
                        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
                    let mut r = header(format!("export {input}"), &loaded);
                    r.set("output", path.display().to_string());
                    (r, true)
                }
            }
        }
    };
    let code = if pass { 0 } else { 1 };
    let mut report = report;
    report.set("status", if pass { "pass" } else { "fail" });
    report.set("exit_code", code);
    Ok(Output {
        text: report.render(cli.json),
        code,
    })
}

fn q(v: &Rational) -> Value {
    Value::String(format_rational(v))
}

fn vector(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(q).collect())
}

fn header(command: String, loaded: &Loaded) -> Report {
    let mut r = Report::new(command);
    let alg = &loaded.algebra;
    r.set("input", loaded.name.clone())
        .set("digest", loaded.digest())
        .set("arity", alg.arity())
        .set("dim", alg.dim())
        .set("symmetry", alg.symmetry().as_str());
    r
}

fn fi_section(alg: &NAryAlgebra) -> (Value, bool) {
    let res = fi_residual(alg);
    let witnesses: Vec<Value> = res
        .witnesses
        .iter()
        .take(MAX_WITNESSES)
        .map(|w| json!({"inner": w.inner, "outer": w.outer, "target": w.target, "violation": q(&w.violation)}))
        .collect();
    let pass = res.is_zero();
    (
        json!({
            "pass": pass,
            "max_violation": q(&res.max_violation),
            "violations": res.witnesses.len(),
            "witnesses": witnesses,
        }),
        pass,
    )
}

fn symmetry_section(audit: &SymmetryReport) -> Value {
    json!({
        "pass": audit.passed(),
        "tuples_checked": audit.tuples_checked,
        "violations": audit.violations.len(),
        "witnesses": audit
            .violations
            .iter()
            .take(MAX_WITNESSES)
            .map(|v| json!({"indices": v.indices, "slot": v.slot}))
            .collect::<Vec<_>>(),
    })
}

fn verify(input: &str, checks: &[Check]) -> Result<(Report, bool), CliError> {
    let loaded = resolve(input)?;
    let alg = &loaded.algebra;
    let mut checks = checks.to_vec();
    checks.sort();
    checks.dedup();
    let names: Vec<&str> = checks
        .iter()
        .map(|c| match c {
            Check::Fi => "fi",
            Check::Gji => "gji",
            Check::Symmetry => "symmetry",
            Check::Metric => "metric",
        })
        .collect();
    let mut r = header(
        format!("verify {input} --checks {}", names.join(",")),
        &loaded,
    );
    let mut all = true;
    for check in checks {
        match check {
            Check::Fi => {
                let (section, pass) = fi_section(alg);
                r.set("fi", section);
                all &= pass;
            }
            Check::Gji => {
                let omega = GlaTensor::new(alg.clone())?;
                let vacuous = omega.dim() < 2 * omega.arity() - 1;
                let res = gji_residual(&omega);
                let pass = res.is_zero();
                let witnesses: Vec<Value> = res
                    .witnesses
                    .iter()
                    .take(MAX_WITNESSES)
                    .map(|w| json!({"block": w.block, "target": w.target, "violation": q(&w.violation)}))
                    .collect();
                r.set(
                    "gji",
                    json!({
                        "pass": pass,
                        "vacuous": vacuous,
                        "max_violation": q(&res.max_violation),
                        "violations": res.witnesses.len(),
                        "witnesses": witnesses,
                    }),
                );
                all &= pass;
            }
            Check::Symmetry => {
                let audit = symmetry_audit(alg, Symmetry::FullSkew);
                all &= audit.passed();
                r.set("symmetry_check", symmetry_section(&audit));
            }
            Check::Metric => {
                let m = metric_checks(alg)?;
                all &= m.all_pass();
                r.set(
                    "metric",
                    json!({
                        "pass": m.all_pass(),
                        "invariant": m.invariant,
                        "lowered_antisymmetric": m.lowered_antisymmetric,
                        "invariant_tensor": m.invariant_tensor,
                    }),
                );
            }
        }
    }
    Ok((r, all))
}

fn cochain_entries(c: &Cochain) -> Value {
    Value::Array(
        c.entries()
            .into_iter()
            .map(|(args, comp, v)| match comp {
                Some(d) => json!({"args": args, "component": d, "value": q(v)}),
                None => json!({"args": args, "value": q(v)}),
            })
            .collect(),
    )
}

/// Reports the identity failure instead of a complex that does not exist.
fn fi_gate(r: &mut Report, alg: &NAryAlgebra) -> bool {
    let (section, pass) = fi_section(alg);
    if !pass {
        r.set("fi", section);
        r.set(
            "error",
            "algebra fails the Filippov identity; the requested computation is undefined",
        );
    }
    pass
}

fn cohomology(
    input: &str,
    action: ActionArg,
    symmetry: SymmetryArg,
) -> Result<(Report, bool), CliError> {
    let loaded = resolve(input)?;
    let alg = &loaded.algebra;
    let (action, action_name) = match action {
        ActionArg::Trivial => (Action::Trivial, "trivial"),
        ActionArg::Adjoint => (Action::Adjoint, "adjoint"),
    };
    let (class, class_name) = match symmetry {
        SymmetryArg::Full => (Symmetry::FullSkew, "full"),
        SymmetryArg::Restricted => (Symmetry::SkewFirstNMinus1, "restricted"),
    };
    let mut r = header(
        format!("h1 {input} --action {action_name} --symmetry {class_name}"),
        &loaded,
    );
    if !fi_gate(&mut r, alg) {
        return Ok((r, false));
    }
    let spec = ComplexSpec::new(alg, action, class)?;
    let rep = h1(&spec)?;
    r.set("action", action_name)
        .set("cochain_class", class.as_str())
        .set("dim_c0", rep.cochains0)
        .set("dim_c1", rep.cochains)
        .set("dim_z1", rep.cocycles)
        .set("dim_b1", rep.coboundaries)
        .set("dim_h1", rep.h1);
    let reps: Vec<Value> = rep
        .representatives
        .iter()
        .zip(&rep.flags)
        .map(|(c, f)| json!({"exact_fi": f.exact_fi, "entries": cochain_entries(c)}))
        .collect();
    r.set("representatives", reps);
    if action == Action::Adjoint && class == Symmetry::SkewFirstNMinus1 {
        if let Ok(explicit) = theorem1_cocycle(alg) {
            let cocycle = spec.is_cocycle(&explicit)?;
            let mut section = json!({"cocycle": cocycle});
            if cocycle {
                section["coboundary"] = json!(spec.is_coboundary(&explicit)?);
                section["class"] = vector(&class_coordinates(&spec, &rep, &explicit)?);
            }
            r.set("explicit_cocycle", section);
        }
    }
    Ok((r, true))
}

fn structure(input: &str) -> Result<(Report, bool), CliError> {
    let loaded = resolve(input)?;
    let alg = &loaded.algebra;
    let mut r = header(format!("structure {input}"), &loaded);
    if alg.symmetry() == Symmetry::None {
        return Err(CliError::Input(
            "structure theory needs antisymmetric fundamental objects (symmetry full or first_n_minus_1)".into(),
        ));
    }
    if !fi_gate(&mut r, alg) {
        return Ok((r, false));
    }
    let series = derived_series(alg);
    let ss = is_semisimple(alg)?;
    let lie = lie_algebra_of(alg)?;
    r.set("derived_series", series.dims.clone())
        .set("solvable", series.solvable)
        .set("semisimple", ss.semisimple)
        .set(
            "kasymov_kernel",
            Value::Array(ss.kernel.iter().map(|v| vector(v)).collect()),
        )
        .set("lie_algebra_dim", lie.dim)
        .set("lie_closure_ok", lie.closure_ok);
    if alg.metric().is_some() {
        let m = metric_checks(alg)?;
        r.set(
            "metric",
            json!({
                "invariant": m.invariant,
                "lowered_antisymmetric": m.lowered_antisymmetric,
                "invariant_tensor": m.invariant_tensor,
            }),
        );
    }
    Ok((r, true))
}

fn nambu(
    vars: &[String],
    fs: &[String],
    gs: &[String],
    check: NambuCheck,
) -> Result<(Report, bool), CliError> {
    let vars: Vec<String> = vars.iter().map(|v| v.trim().to_string()).collect();
    for (i, v) in vars.iter().enumerate() {
        let ok = v
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !ok {
            return Err(CliError::Input(format!("invalid variable name {v:?}")));
        }
        if vars[..i].contains(v) {
            return Err(CliError::Input(format!("duplicate variable {v:?}")));
        }
    }
    let parse_all = |texts: &[String]| -> Result<Vec<Polynomial>, CliError> {
        texts
            .iter()
            .map(|t| Polynomial::parse(t, &vars).map_err(CliError::from))
            .collect()
    };
    let (fp, gp) = (parse_all(fs)?, parse_all(gs)?);
    let n = vars.len();
    let expect = |what: &str, got: usize, want: usize| -> Result<(), CliError> {
        if got == want {
            Ok(())
        } else {
            Err(CliError::Input(format!(
                "{what}: expected {want} polynomials for {n} variables, got {got}"
            )))
        }
    };
    let check_name = match check {
        NambuCheck::Fi => "fi",
        NambuCheck::Leibniz => "leibniz",
        NambuCheck::Skew => "skew",
    };
    let mut command = format!("nambu --vars {} --fs {}", vars.join(","), fs.join(","));
    if !gs.is_empty() {
        command.push_str(&format!(" --gs {}", gs.join(",")));
    }
    command.push_str(&format!(" --check {check_name}"));
    let digest = hex::encode(Sha256::digest(command.as_bytes()));
    let mut r = Report::new(command);
    r.set("digest", digest).set("arity", n);
    let pass = match check {
        NambuCheck::Fi => {
            expect("--fs", fp.len(), n - 1)?;
            expect("--gs", gp.len(), n)?;
            let res = np_fi_residual(&fp, &gp)?;
            r.set("residual", res.to_string());
            res.is_zero()
        }
        NambuCheck::Leibniz => {
            expect("--fs", fp.len(), n - 1)?;
            expect("--gs", gp.len(), 2)?;
            let res = leibniz_rule_residual(&fp, &gp[0], &gp[1])?;
            r.set("residual", res.to_string());
            res.is_zero()
        }
        NambuCheck::Skew => {
            expect("--fs", fp.len(), n)?;
            expect("--gs", gp.len(), 0)?;
            let bracket = jacobian_bracket(&fp, &vars)?;
            let skew = bracket_skew_check(&fp)?;
            r.set("bracket", bracket.to_string()).set("skew", skew);
            skew
        }
    };
    Ok((r, pass))
}

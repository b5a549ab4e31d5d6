use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use flgauge::acceptance;
use flgauge::arith::{MazurTable, Zq};
use flgauge::fl::{fl_hom_ext1, torsionfree_lift, FLModule};
use flgauge::format::{self, ModuleDoc};
use flgauge::gradmod::Mat;
use flgauge::mazsyn::{syn_vs_ext_crosscheck, syntomic_cohomology};
use flgauge::report::Report;
use flgauge::sen::{self, GradedFiberData};
use flgauge::suites::{self, Suite, SuiteParams};
use flgauge::Error;

#[derive(Parser)]
#[command(name = "flgauge", version, about = "Witt vectors, divided powers and Fontaine-Laffaille modules, exactly")]
struct Cli {
    /// machine-readable output
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Table of Mazur numbers [n] for 1 <= n <= max
    MazurNumbers {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        max: u64,
    },
    /// Run identity suites and report each check
    Verify {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 2)]
        witt_len: usize,
        /// degree window D (default 4 p^n)
        #[arg(long)]
        window: Option<i64>,
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long, default_value_t = acceptance::SEED)]
        seed: u64,
    },
    /// Operations on FL modules and morphisms
    Fl {
        #[arg(value_enum)]
        op: FlOp,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "in2")]
        input2: Option<PathBuf>,
        #[arg(long = "i")]
        i: Option<usize>,
    },
    /// Syntomic cohomology in weight I
    Syn {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        weight: usize,
        /// compare with (Hom, Ext^1)(k{I}, M)
        #[arg(long)]
        crosscheck: bool,
    },
    /// Sen operator, the correction alpha and the endofunctor
    Sen {
        #[arg(value_enum)]
        op: SenOp,
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Every acceptance criterion, with timing
    Selftest {
        /// run only these criteria
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum FlOp {
    Check,
    Kernel,
    Cokernel,
    Ext1,
    Lift,
    Twist,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum SenOp {
    Theta,
    Alpha,
    Apply,
    ExtClass,
}

/// Command result: text for humans, JSON for machines, and whether every check passed.
struct Out {
    text: String,
    json: Value,
    ok: bool,
}

impl Out {
    fn new(schema: &str, text: String, mut json: Value, ok: bool) -> Self {
        json["schema"] = Value::String(format!("flgauge.{schema}/1"));
        Out { text, json, ok }
    }
}

fn zq_json(z: &Zq) -> Value {
    if z.ctx().degree() == 1 {
        json!(z.coeffs()[0])
    } else {
        json!(z.coeffs())
    }
}

fn zq_text(z: &Zq) -> String {
    let c = z.coeffs();
    if c[1..].iter().all(|&x| x == 0) {
        c[0].to_string()
    } else {
        format!("({})", c.iter().map(u64::to_string).collect::<Vec<_>>().join(","))
    }
}

fn mat_json(m: &Mat) -> Value {
    Value::Array((0..m.rows()).map(|r| Value::Array(m.row(r).iter().map(zq_json).collect())).collect())
}

fn mat_text(m: &Mat) -> String {
    if m.rows() == 0 || m.cols() == 0 {
        return format!("  ({}x{} matrix)\n", m.rows(), m.cols());
    }
    (0..m.rows()).map(|r| format!("  {}\n", m.row(r).iter().map(zq_text).collect::<Vec<_>>().join(" "))).collect()
}

fn report_text(r: &Report) -> String {
    let mut s = format!("{}\n", r.title);
    for c in &r.checks {
        let status = if c.passed { "pass" } else { "FAIL" };
        if c.detail.is_empty() {
            s += &format!("  [{status}] {}\n", c.name);
        } else {
            s += &format!("  [{status}] {}: {}\n", c.name, c.detail);
        }
    }
    s
}

fn divisors_text(p: u64, e: &[u32]) -> String {
    format!("({})", e.iter().map(|k| format!("{p}^{k}")).collect::<Vec<_>>().join(", "))
}

fn read_fl(path: &std::path::Path) -> flgauge::Result<FLModule> {
    format::read_module(path)?.into_fl()
}

fn mazur_numbers(p: u64, max: u64) -> flgauge::Result<Out> {
    let table = MazurTable::new(p, max)?;
    let vals: Vec<u64> = (1..=max).map(|n| table.get(n).expect("within the table")).collect();
    let text = vals.iter().enumerate().map(|(k, v)| format!("[{}] = {v}\n", k + 1)).collect();
    Ok(Out::new("mazur-numbers", text, json!({ "p": p, "max": max, "values": vals }), true))
}

fn verify(params: SuiteParams, suite: Suite) -> flgauge::Result<Out> {
    let mut reports = suites::run(suite, &params)?;
    for r in &mut reports {
        r.sort();
    }
    let ok = reports.iter().all(Report::passed);
    let text = reports.iter().map(report_text).collect::<String>() + if ok { "result: pass\n" } else { "result: FAIL\n" };
    Ok(Out::new("verify", text, json!({ "params": params, "suite": suite, "passed": ok, "reports": reports }), ok))
}

fn fl_cmd(op: FlOp, input: &std::path::Path, input2: Option<&std::path::Path>, i: Option<usize>) -> flgauge::Result<Out> {
    match op {
        FlOp::Check => {
            let m = read_fl(input)?;
            let r = m.validate()?;
            let ok = r.passed();
            Ok(Out::new("fl-check", report_text(&r), json!({ "passed": ok, "report": r }), ok))
        }
        FlOp::Kernel | FlOp::Cokernel => {
            let f = format::read_morphism(input)?;
            let (name, module) = match op {
                FlOp::Kernel => ("fl-kernel", f.kernel()?.source().clone()),
                _ => ("fl-cokernel", f.cokernel()?.target().clone()),
            };
            let r = module.validate()?;
            let text = format::emit_fl(&module);
            let ok = r.passed();
            Ok(Out::new(name, text.clone(), json!({ "module": text, "valid": ok, "report": r }), ok))
        }
        FlOp::Ext1 => {
            let n_path = input2.ok_or_else(|| Error::InvalidArgument("ext1 needs --in2 for the second module".into()))?;
            let (m, n) = (read_fl(input)?, read_fl(n_path)?);
            let (hom, ext) = fl_hom_ext1(&m, &n)?;
            let text = format!("dim Hom = {hom}\ndim Ext^1 = {ext}\n");
            Ok(Out::new("fl-ext1", text, json!({ "hom": hom, "ext1": ext }), true))
        }
        FlOp::Lift => {
            let l = torsionfree_lift(&read_fl(input)?)?;
            let text = format::emit_fl(&l);
            Ok(Out::new("fl-lift", text.clone(), json!({ "module": text }), true))
        }
        FlOp::Twist => {
            let k = i.ok_or_else(|| Error::InvalidArgument("twist needs --i".into()))?;
            let t = read_fl(input)?.twist(k);
            let text = format::emit_fl(&t);
            Ok(Out::new("fl-twist", text.clone(), json!({ "module": text, "i": k }), true))
        }
    }
}

fn syn_cmd(input: &std::path::Path, weight: usize, crosscheck: bool) -> flgauge::Result<Out> {
    let doc = format::read_module(input)?;
    let maz = match &doc {
        ModuleDoc::Fl(m) => flgauge::mazsyn::fl_to_mazur(m),
        ModuleDoc::Mazur(m) => m.clone(),
    };
    let p = maz.base().ctx().p();
    let s = syntomic_cohomology(&maz, weight)?;
    let mut text = format!("H0 = {}\nH1 = {}\n", divisors_text(p, &s.h0), divisors_text(p, &s.h1));
    if !s.n_determined {
        text += "warning: torsion reaches the precision bound; raise N to certify\n";
    }
    let mut j = json!({ "weight": weight, "h0": s.h0, "h1": s.h1, "n_determined": s.n_determined });
    let mut ok = true;
    if crosscheck {
        let m = doc.into_fl()?;
        let x = syn_vs_ext_crosscheck(&m, weight)?;
        ok = x.agrees();
        text += &format!(
            "crosscheck: syntomic dims {:?}, (Hom, Ext^1)(k{{{weight}}}, M) = {:?}: {}\n",
            x.syntomic,
            x.fl,
            if ok { "agree" } else { "DISAGREE" }
        );
        j["crosscheck"] = json!({ "syntomic": x.syntomic, "fl": x.fl, "agrees": ok });
    }
    Ok(Out::new("syn", text, j, ok))
}

fn sen_cmd(op: SenOp, input: &std::path::Path) -> flgauge::Result<Out> {
    let m = read_fl(input)?;
    match op {
        SenOp::Theta => {
            let g = GradedFiberData::new(&m)?;
            let th = g.theta();
            let ok = g.eigenspaces_match();
            let text = format!("Theta on the fiber:\n{}eigenspaces match gr dimensions: {ok}\n", mat_text(&th));
            Ok(Out::new("sen-theta", text, json!({ "theta": mat_json(&th), "gr_dims": g.gr_dims, "eigenspaces_match": ok }), ok))
        }
        SenOp::Alpha => {
            let a = sen::alpha(&m)?;
            let sq_zero = a.mul(&a).reduce_rows(&vec![1; a.rows()]).is_zero();
            let text = format!("alpha:\n{}alpha^2 = 0: {sq_zero}\n", mat_text(&a));
            Ok(Out::new("sen-alpha", text, json!({ "alpha": mat_json(&a), "vanishes": a.is_zero(), "square_zero": sq_zero }), sq_zero))
        }
        SenOp::Apply => {
            let out = sen::di_maz_endofunctor(&m)?;
            let text = format::emit_fl(&out);
            let fixed = out == m;
            Ok(Out::new("sen-apply", text.clone(), json!({ "module": text, "unchanged": fixed }), true))
        }
        SenOp::ExtClass => {
            let c = sen::extension_class(&m)?;
            let text = format!("class t = {}\nsplits: {}\n", zq_text(&c.t), c.splits);
            Ok(Out::new("sen-ext-class", text, json!({ "t": zq_json(&c.t), "fp_coords": c.coords, "splits": c.splits }), true))
        }
    }
}

fn selftest(only: &[u8]) -> Out {
    let start = std::time::Instant::now();
    let outcomes: Vec<acceptance::Outcome> = if only.is_empty() {
        acceptance::run_all()
    } else {
        only.iter().filter_map(|&id| acceptance::run_one(id)).collect()
    };
    let ok = !outcomes.is_empty() && outcomes.iter().all(|o| o.passed);
    let passed = outcomes.iter().filter(|o| o.passed).count();
    let mut text: String = outcomes.iter().map(|o| format!("{o}\n")).collect();
    text += &format!("selftest: {passed}/{} criteria passed in {} ms\n", outcomes.len(), start.elapsed().as_millis());
    // timings are left out of the JSON so that repeated runs are byte-identical
    let crit: Vec<Value> = outcomes.iter().map(|o| json!({ "id": o.id, "name": o.name, "passed": o.passed, "report": o.report })).collect();
    Out::new("selftest", text, json!({ "passed": ok, "criteria": crit }), ok)
}

/// Exit status 2 for malformed input or arguments, 1 for mathematical failures.
fn error_status(e: &Error) -> u8 {
    match e {
        Error::NonUnit(_) | Error::NotNDetermined(_) | Error::Integrality(_) | Error::Verification(_) | Error::Truncation { .. } => 1,
        _ => 2,
    }
}

fn error_json(e: &Error) -> Value {
    let kind = format!("{e:?}").split(['(', ' ', '{']).next().unwrap_or("Error").to_string();
    let mut j = json!({ "schema": "flgauge.error/1", "kind": kind, "message": e.to_string() });
    if let Error::Parse { line, .. } = e {
        j["line"] = json!(line);
    }
    j
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::MazurNumbers { p, max } => mazur_numbers(*p, *max),
        Cmd::Verify { p, witt_len, window, suite, seed } => verify(SuiteParams::new(*p, *witt_len, *window, *seed), *suite),
        Cmd::Fl { op, input, input2, i } => fl_cmd(*op, input, input2.as_deref(), *i),
        Cmd::Syn { input, weight, crosscheck } => syn_cmd(input, *weight, *crosscheck),
        Cmd::Sen { op, input } => sen_cmd(*op, input),
        Cmd::Selftest { only } => Ok(selftest(only)),
    };
    match result {
        Ok(out) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&out.json).expect("serializable"));
            } else {
                print!("{}", out.text);
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&error_json(&e)).expect("serializable"));
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(error_status(&e))
        }
    }
}

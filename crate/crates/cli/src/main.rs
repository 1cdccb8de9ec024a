mod sink;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nlogic::correspondence::check::soundness_frames;
use nlogic::correspondence::{correspond, verify_correspondence, Assumption, CorrError, StepMode, DEFAULT_DEPTH};
use nlogic::duality::{
    canonical_frame, expected_classes, verify_canonical_class, verify_canonical_extension, verify_canonical_structure,
    verify_embedding, verify_pi_extension, Signature,
};
use nlogic::frame::{check_axiom, check_frame_class, parse_frame, ClassId, RelName, Sort, SortedFrame};
use nlogic::order::{parse_algebra, validate_algebra, AlgebraError};
use nlogic::report::Report;
use nlogic::sample::sample_class_frames;
use nlogic::semantics::{
    check_full_abstraction, check_validity, eval_object, parse_valuation, SortedValuation, Validity,
};
use nlogic::syntax::{modal_name, parse_formula, parse_sequent, ImpMode, Sequent};

use sink::{Format, Sink};

const GRAMMARS: &str = "\
Formulas: variables p q r1 ..., constants top bot t, operators & | * -> <-
  (* binds tightest, then & and |, then the right-associative -> and <-).
Sequents: FORMULA |- FORMULA.
Classes: PU PUl PUl* PUl_* LK LK* LK_* S L quasi-serial classical distributive.
Frame files: sort1: x0 x1 / sortD: y0 / I: (x0,y0) / U: x0 | all / R: (x0|x0,x1) ...
Algebra files: elements: / order: a<=b / kind: poset|semilattice|lattice / unit: / imp: (a,b)=c / prod: / limp:";

#[derive(Parser)]
#[command(name = "nlogic", version, about = "Dual frames and Sahlqvist correspondence for finite implicative and Lambek logics")]
#[command(after_help = GRAMMARS)]
struct Cli {
    /// Output style
    #[arg(long, value_enum, default_value = "human", global = true)]
    format: Format,
    /// Report elapsed time (makes output nondeterministic)
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate an algebra file
    CheckAlgebra { file: PathBuf },
    /// Print the canonical frame of an algebra
    Dualize {
        file: PathBuf,
        /// poset, semilattice, lattice or lambek; defaults to the richest the algebra supports
        #[arg(long)]
        signature: Option<String>,
        /// Admit the empty filter and ideal as points
        #[arg(long)]
        allow_empty: bool,
        /// Write the point table here instead of appending it as comments
        #[arg(long)]
        sidecar: Option<PathBuf>,
        /// Also run the representation and canonicity checks
        #[arg(long)]
        verify: bool,
        /// Write the frame file here
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Check a frame against the axioms of a class
    CheckFrame {
        file: PathBuf,
        #[arg(long, required_unless_present = "axiom")]
        class: Option<String>,
        /// Single axiom id, repeatable
        #[arg(long)]
        axiom: Vec<String>,
    },
    /// Extent and co-extent of a formula under a valuation
    Eval {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long)]
        formula: String,
        #[arg(long)]
        valuation: PathBuf,
        #[arg(long, value_parser = parse_imp, default_value = "table6")]
        mode: ImpMode,
    },
    /// Validity of a sequent over all stable valuations
    Valid {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long)]
        sequent: String,
        #[arg(long, default_value_t = 3)]
        max_vars: usize,
    },
    /// First-order correspondent of a sequent
    Correspond {
        #[command(flatten)]
        query: Query,
        /// Print every rule application
        #[arg(long)]
        trace: bool,
    },
    /// Cross-check a correspondent against sequent validity on a family of frames
    Verify {
        #[command(flatten)]
        query: Query,
        /// Directory of .frame files
        #[arg(long, conflicts_with_all = ["enumerate", "sample"])]
        frames: Option<PathBuf>,
        /// All class frames with at most N points per sort (N <= 2)
        #[arg(long, conflicts_with = "sample")]
        enumerate: Option<usize>,
        /// COUNT seeded random class frames of at most --max points per sort
        #[arg(long)]
        sample: Option<usize>,
        #[arg(long, default_value_t = 3)]
        max: usize,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        max_vars: usize,
    },
    /// Run the bundled acceptance suite
    Selftest {
        /// Only this criterion (1-11)
        #[arg(long)]
        criterion: Option<usize>,
    },
}

#[derive(Args)]
struct Query {
    #[arg(long)]
    sequent: String,
    #[arg(long, value_parser = parse_class)]
    class: ClassId,
    /// auto, translate or cotranslate
    #[arg(long, default_value = "auto")]
    mode: StepMode,
    /// table6 or rspoon; rspoon for Lambek classes by default
    #[arg(long, value_parser = parse_imp)]
    imp: Option<ImpMode>,
    #[arg(long, default_value_t = DEFAULT_DEPTH)]
    depth: usize,
}

fn parse_class(s: &str) -> Result<ClassId, String> {
    ClassId::parse(s).ok_or_else(|| format!("unknown class `{s}`"))
}

fn parse_imp(s: &str) -> Result<ImpMode, String> {
    s.parse()
}

/// Usage or input error: reported on stderr, exit 2.
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Usage {
        Usage(e.to_string())
    }
}

fn read(path: &Path) -> Result<(String, String), Usage> {
    let text = std::fs::read_to_string(path).map_err(|e| Usage(format!("{}: {e}", path.display())))?;
    Ok((path.display().to_string(), text))
}

fn load_frame(path: &Path) -> Result<(SortedFrame, (String, String)), Usage> {
    let input = read(path)?;
    let f = parse_frame(&input.1).map_err(|e| Usage(format!("{}: {e}", path.display())))?;
    Ok((f, input))
}

fn check_algebra(out: &mut Sink, file: &Path) -> Result<(), Usage> {
    let input = read(file)?;
    let raw = parse_algebra(&input.1).map_err(|e| Usage(format!("{}: {e}", file.display())))?;
    out.header("check-algebra", &[input]);
    match validate_algebra(&raw) {
        Ok(alg) => {
            out.note(format!("{} elements, kind {}", alg.size(), alg.kind()));
            let props = [
                ("product", alg.has_prod()),
                ("left implication", alg.has_limp()),
                ("unit", alg.unit().is_some()),
                ("integral", alg.is_integral()),
                ("associative", alg.has_prod() && alg.is_associative()),
                ("commutative", alg.has_prod() && alg.is_commutative()),
            ];
            let has: Vec<&str> = props.iter().filter(|p| p.1).map(|p| p.0).collect();
            out.note(format!("has: {}", if has.is_empty() { "-".into() } else { has.join(", ") }));
            out.check("algebra", "axioms", true, None);
        }
        Err(e @ AlgebraError::Parse { .. }) => return Err(Usage(e.to_string())),
        Err(e) => out.check("algebra", "axioms", false, Some(&e.to_string())),
    }
    Ok(())
}

fn dualize(
    out: &mut Sink,
    file: &Path,
    signature: Option<&str>,
    allow_empty: bool,
    sidecar: Option<&Path>,
    verify: bool,
    output: Option<&Path>,
) -> Result<(), Usage> {
    let input = read(file)?;
    let alg = parse_algebra(&input.1).and_then(|r| validate_algebra(&r)).map_err(|e| Usage(format!("{}: {e}", file.display())))?;
    let sig = match signature {
        Some(s) => Signature::parse(s).ok_or_else(|| Usage(format!("unknown signature `{s}`")))?,
        None => Signature::of(&alg),
    };
    let cf = canonical_frame(&alg, sig, allow_empty)?;
    out.header("dualize", &[input]);
    out.note(format!("signature {sig}"));
    let table = cf.sidecar(&alg);
    let write = |p: &Path, text: &str| std::fs::write(p, text).map_err(|e| Usage(format!("{}: {e}", p.display())));
    let text = match sidecar {
        Some(p) => {
            write(p, &table)?;
            cf.frame().to_text()
        }
        None => {
            let commented: String = table.lines().map(|l| format!("# {l}\n")).collect();
            format!("{}{commented}", cf.frame().to_text())
        }
    };
    match output {
        Some(p) => {
            write(p, &text)?;
            out.value("frame written to", p.display().to_string());
        }
        None => out.value("frame", text),
    }
    if verify {
        let mut reps = vec![verify_embedding(&alg, &cf)?, verify_canonical_extension(&alg, &cf)?];
        if alg.kind() == nlogic::order::Kind::Lattice {
            reps.push(verify_pi_extension(&alg, &cf)?);
        }
        reps.push(verify_canonical_structure(&alg, &cf)?);
        for c in expected_classes(&alg, &cf) {
            reps.push(verify_canonical_class(&alg, &cf, c)?);
        }
        for r in &reps {
            out.report(r);
        }
    }
    Ok(())
}

fn check_frame(out: &mut Sink, file: &Path, class: Option<&str>, axioms: &[String]) -> Result<(), Usage> {
    let (f, input) = load_frame(file)?;
    out.header("check-frame", &[input]);
    if let Some(c) = class {
        let class = parse_class(c).map_err(Usage)?;
        let mut rep = Report::new(format!("frame in {class}"));
        rep.absorb(&check_frame_class(&f, class)?);
        out.report(&rep);
    }
    for id in axioms {
        if !ClassId::ALL.iter().any(|c| c.axioms().contains(&id.as_str())) {
            return Err(Usage(format!("unknown axiom `{id}`")));
        }
        match check_axiom(&f, id) {
            Ok(w) => out.check("axioms", id, w.is_none(), w.as_deref()),
            Err(e) => out.check("axioms", id, false, Some(&e.to_string())),
        }
    }
    Ok(())
}

fn eval(out: &mut Sink, frame: &Path, formula: &str, valuation: &Path, mode: ImpMode) -> Result<(), Usage> {
    let (f, finput) = load_frame(frame)?;
    let vinput = read(valuation)?;
    let phi = parse_formula(formula)?;
    let (val, warnings) = parse_valuation(&f, &vinput.1)?;
    out.header("eval", &[finput, vinput, ("formula".into(), formula.into())]);
    for w in warnings {
        out.note(w);
    }
    let e = eval_object(&f, &val, &phi)?;
    out.value("extent", f.set_names(Sort::One, e.extent));
    out.value("co-extent", f.set_names(Sort::D, e.co_extent));
    let sval: SortedValuation = val.iter().map(|(p, s)| (modal_name(p), *s)).collect();
    out.report(&check_full_abstraction(&f, &phi, &sval, mode)?);
    Ok(())
}

fn show_counter(f: &SortedFrame, v: &Validity) -> Option<String> {
    v.counter.as_ref().map(|(val, x)| {
        let parts: Vec<String> = val.iter().map(|(p, s)| format!("{p}={}", f.set_names(Sort::One, *s))).collect();
        format!("{} at {}", parts.join(", "), f.name(Sort::One, *x))
    })
}

fn valid(out: &mut Sink, frame: &Path, sequent: &str, max_vars: usize) -> Result<(), Usage> {
    let (f, input) = load_frame(frame)?;
    let seq = parse_sequent(sequent)?;
    out.header("valid", &[input, ("sequent".into(), sequent.into())]);
    let v = check_validity(&f, &seq, max_vars)?;
    out.check("validity", &seq.to_string(), v.valid, show_counter(&f, &v).as_deref());
    Ok(())
}

fn query_input(q: &Query) -> Vec<(String, String)> {
    let imp = q.imp.map(|i| format!("{i:?}")).unwrap_or_else(|| "default".into());
    vec![
        ("sequent".into(), q.sequent.clone()),
        ("class".into(), q.class.to_string()),
        ("mode".into(), format!("{:?}/{imp}", q.mode)),
    ]
}

fn run_correspond(out: &mut Sink, q: &Query, seq: &Sequent, trace: bool) -> Result<Option<nlogic::syntax::Fo>, Usage> {
    match correspond(seq, q.class, q.mode, q.imp, q.depth) {
        Ok(c) => {
            out.value("system", c.reduction.initial.to_string());
            if trace {
                for (i, s) in c.reduction.trace.iter().enumerate() {
                    out.trace(i + 1, s.rule.as_str(), &s.position.to_string(), &s.after.to_string());
                }
            }
            out.value("canonical form", c.reduction.system.to_string());
            for n in &c.notes {
                out.note(n);
            }
            out.value("correspondent", c.formula.to_string());
            out.check("correspondence", "reduction", true, None);
            Ok(Some(c.formula))
        }
        Err(CorrError::NotSahlqvist { trace: lines }) => {
            for l in &lines {
                out.note(l);
            }
            out.check("correspondence", "reduction", false, Some("no canonical Sahlqvist form within the depth bound"));
            Ok(None)
        }
        Err(e) => Err(Usage(e.to_string())),
    }
}

fn class_frames(
    out: &Sink,
    class: ClassId,
    fo: &nlogic::syntax::Fo,
    enumerate: Option<usize>,
    sample: Option<usize>,
    max: usize,
    seed: u64,
) -> Result<Vec<SortedFrame>, Usage> {
    if let Some(n) = enumerate {
        if n > 2 {
            return Err(Usage("enumeration is limited to 2 points per sort; use --sample".into()));
        }
        let (rels, assumption) = if class.is_lambek() {
            (BTreeSet::from([RelName::R]), Some(Assumption::Residuated))
        } else {
            let mut r: BTreeSet<RelName> = fo.relations();
            r.insert(RelName::T);
            (r, None)
        };
        let all = soundness_frames(&rels, true, assumption, n);
        let total = all.len();
        let kept: Vec<SortedFrame> =
            all.into_iter().filter(|f| check_frame_class(f, class).map(|r| r.all_pass()).unwrap_or(false)).collect();
        out.note(format!("{} of {total} enumerated frames are in {class}", kept.len()));
        return Ok(kept);
    }
    let count = sample.unwrap_or(200);
    let fs = sample_class_frames(seed, class, count, max, 200 * count);
    out.note(format!("{} sampled frames (seed {seed}, at most {max} points per sort)", fs.len()));
    Ok(fs)
}

fn frames_in_dir(dir: &Path) -> Result<(Vec<SortedFrame>, Vec<(String, String)>), Usage> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Usage(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "frame"))
        .collect();
    paths.sort();
    let mut frames = Vec::new();
    let mut inputs = Vec::new();
    for p in paths {
        let (f, input) = load_frame(&p)?;
        frames.push(f);
        inputs.push(input);
    }
    Ok((frames, inputs))
}

#[allow(clippy::too_many_arguments)]
fn verify(
    out: &mut Sink,
    q: &Query,
    dir: Option<&Path>,
    enumerate: Option<usize>,
    sample: Option<usize>,
    max: usize,
    seed: u64,
    max_vars: usize,
) -> Result<(), Usage> {
    let seq = parse_sequent(&q.sequent)?;
    let mut inputs = query_input(q);
    let listed = match dir {
        Some(d) => Some(frames_in_dir(d)?),
        None => None,
    };
    if let Some((_, files)) = &listed {
        inputs.extend(files.iter().cloned());
    } else {
        inputs.push(("family".into(), format!("enumerate={enumerate:?} sample={sample:?} max={max} seed={seed}")));
    }
    out.header("verify", &inputs);
    let Some(fo) = run_correspond(out, q, &seq, false)? else { return Ok(()) };
    let frames = match listed {
        Some((fs, _)) => fs,
        None => class_frames(out, q.class, &fo, enumerate, sample, max, seed)?,
    };
    if frames.is_empty() {
        return Err(Usage("the frame family is empty".into()));
    }
    out.report(&verify_correspondence(&frames, &seq, &fo, max_vars)?);
    Ok(())
}

fn selftest(out: &mut Sink, criterion: Option<usize>) -> Result<(), Usage> {
    let n = nlogic::acceptance::CRITERIA.len();
    let ids: Vec<usize> = match criterion {
        Some(c) if (1..=n).contains(&c) => vec![c],
        Some(c) => return Err(Usage(format!("criterion {c} out of range 1-{n}"))),
        None => (1..=n).collect(),
    };
    let inputs: Vec<(String, String)> =
        nlogic::acceptance::FIXTURES.iter().map(|(n, t)| (n.to_string(), t.to_string())).collect();
    out.header("selftest", &inputs);
    for id in ids {
        out.criterion(&nlogic::acceptance::run_criterion(id));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = Sink::new(cli.format, cli.timing);
    let done = match &cli.command {
        Command::CheckAlgebra { file } => check_algebra(&mut out, file),
        Command::Dualize { file, signature, allow_empty, sidecar, verify, output } => {
            dualize(&mut out, file, signature.as_deref(), *allow_empty, sidecar.as_deref(), *verify, output.as_deref())
        }
        Command::CheckFrame { file, class, axiom } => check_frame(&mut out, file, class.as_deref(), axiom),
        Command::Eval { frame, formula, valuation, mode } => eval(&mut out, frame, formula, valuation, *mode),
        Command::Valid { frame, sequent, max_vars } => valid(&mut out, frame, sequent, *max_vars),
        Command::Correspond { query, trace } => parse_sequent(&query.sequent).map_err(Usage::from).and_then(|seq| {
            out.header("correspond", &query_input(query));
            run_correspond(&mut out, query, &seq, *trace).map(|_| ())
        }),
        Command::Verify { query, frames, enumerate, sample, max, seed, max_vars } => {
            verify(&mut out, query, frames.as_deref(), *enumerate, *sample, *max, *seed, *max_vars)
        }
        Command::Selftest { criterion } => selftest(&mut out, *criterion),
    };
    match done {
        Ok(()) => ExitCode::from(out.finish()),
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

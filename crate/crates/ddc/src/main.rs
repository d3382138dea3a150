//! Command-line surface over the DDC library.
//!
//! Exit codes: 0 success (for `check`: the set is a DDC), 1 check failed or
//! input set not a DDC, 2 usage error, 3 resource guard or search budget
//! exceeded.

use ddc::bounds::bounds_report;
use ddc::construct::{construct_lower, mirror};
use ddc::enumerate::{iter_ball, iter_sphere};
use ddc::io::{read_ddc_file, write_ddc_file};
use ddc::quotient::{lift, GroupOracle};
use ddc::rng::SplitMix64;
use ddc::search::{max_ddc_exact, SearchConfig};
use ddc::word::{GroupCtx, Word};
use ddc::{Error, Limits};
use serde_json::{json, Value};
use std::collections::{HashMap, HashSet};
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

const USAGE: &str = "\
ddc — distinct difference configurations in free groups

USAGE:
  ddc enumerate --n N --radius R [--ball] [--limit K]
  ddc check --in FILE [--left] [--sphere-fast]
  ddc construct mirror --n N --d D --out FILE
  ddc construct random --n N --d D [--seed S] --out FILE [--report FILE]
  ddc bounds --n N --d D [--gamma G]
  ddc search --n N --d D [--no-symmetry] [--nodes K] [--time S] [--witness-out FILE]
  ddc lift --group FILE|'zmod M gens=a,b,..' --set h1,h2,.. --d D [--out FILE]
  ddc bench [--n N]

GLOBAL FLAGS:
  --json           machine-readable run report on stdout
  --threads K      partition pair scans over K workers (results identical)
  --max-pairs P    ordered-pair guard (default 2^31; env DDC_MAX_PAIRS)
  --max-elements E materialization guard (default 10^7; env DDC_MAX_ELEMENTS)

WORD FORMAT: whitespace-separated signed integers ('1 -2 1'), 'e' for the
identity; compact letters accepted on input ('aBa'). DDC files: optional
'# ddc n=<N>' header, one word per line, '#' lines ignored.

EXIT CODES: 0 ok / is a DDC; 1 check failed; 2 usage error; 3 resource or
budget exceeded.
";

/// Writes a line to stdout, exiting quietly if the reader closed the pipe.
macro_rules! outln {
    ($($arg:tt)*) => {{
        use std::io::Write;
        if writeln!(std::io::stdout(), $($arg)*).is_err() {
            std::process::exit(0);
        }
    }};
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    match run(&argv) {
        Ok(code) => ExitCode::from(code),
        Err(CliError { code, message }) => {
            eprintln!("error: {message}");
            if code == 2 {
                eprintln!("run `ddc --help` for usage");
            }
            ExitCode::from(code)
        }
    }
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> CliError {
        CliError {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        let code = match &e {
            Error::ResourceLimit { .. } => 3,
            Error::NotADdc => 1,
            _ => 2,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

fn run(argv: &[String]) -> Result<u8, CliError> {
    if argv.is_empty() || argv[0] == "--help" || argv[0] == "-h" || argv[0] == "help" {
        print!("{USAGE}");
        return Ok(0);
    }
    let args = Args::parse(argv)?;
    match args.command.as_str() {
        "enumerate" => cmd_enumerate(&args),
        "check" => cmd_check(&args),
        "construct" => cmd_construct(&args),
        "bounds" => cmd_bounds(&args),
        "search" => cmd_search(&args),
        "lift" => cmd_lift(&args),
        "bench" => cmd_bench(&args),
        other => Err(CliError::usage(format!("unknown command {other:?}"))),
    }
}

const SWITCHES: &[&str] = &[
    "--ball",
    "--left",
    "--sphere-fast",
    "--no-symmetry",
    "--json",
];

struct Args {
    command: String,
    positional: Vec<String>,
    flags: HashMap<String, String>,
    switches: HashSet<String>,
}

impl Args {
    fn parse(argv: &[String]) -> Result<Args, CliError> {
        let command = argv[0].clone();
        let mut positional = Vec::new();
        let mut flags = HashMap::new();
        let mut switches = HashSet::new();
        let mut i = 1;
        while i < argv.len() {
            let a = &argv[i];
            if let Some(name) = a.strip_prefix("--") {
                if SWITCHES.contains(&a.as_str()) {
                    switches.insert(name.to_string());
                } else {
                    let value = argv
                        .get(i + 1)
                        .ok_or_else(|| CliError::usage(format!("flag {a} needs a value")))?;
                    flags.insert(name.to_string(), value.clone());
                    i += 1;
                }
            } else {
                positional.push(a.clone());
            }
            i += 1;
        }
        Ok(Args {
            command,
            positional,
            flags,
            switches,
        })
    }

    fn json(&self) -> bool {
        self.switches.contains("json")
    }

    fn get<T: std::str::FromStr>(&self, name: &str) -> Result<T, CliError> {
        let raw = self
            .flags
            .get(name)
            .ok_or_else(|| CliError::usage(format!("missing required flag --{name}")))?;
        raw.parse()
            .map_err(|_| CliError::usage(format!("bad value for --{name}: {raw:?}")))
    }

    fn get_or<T: std::str::FromStr>(&self, name: &str, default: T) -> Result<T, CliError> {
        match self.flags.get(name) {
            None => Ok(default),
            Some(raw) => raw
                .parse()
                .map_err(|_| CliError::usage(format!("bad value for --{name}: {raw:?}"))),
        }
    }

    fn get_opt<T: std::str::FromStr>(&self, name: &str) -> Result<Option<T>, CliError> {
        match self.flags.get(name) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|_| CliError::usage(format!("bad value for --{name}: {raw:?}"))),
        }
    }

    fn limits(&self) -> Result<Limits, CliError> {
        let mut limits = Limits::default();
        if let Ok(v) = std::env::var("DDC_MAX_PAIRS") {
            limits.max_pairs = v
                .parse()
                .map_err(|_| CliError::usage("bad DDC_MAX_PAIRS"))?;
        }
        if let Ok(v) = std::env::var("DDC_MAX_ELEMENTS") {
            limits.max_elements = v
                .parse()
                .map_err(|_| CliError::usage("bad DDC_MAX_ELEMENTS"))?;
        }
        limits.max_pairs = self.get_or("max-pairs", limits.max_pairs)?;
        limits.max_elements = self.get_or("max-elements", limits.max_elements)?;
        limits.threads = self.get_or("threads", limits.threads)?;
        Ok(limits)
    }

    fn ctx(&self) -> Result<GroupCtx, CliError> {
        let n: u16 = self.get("n")?;
        Ok(GroupCtx::new(n)?)
    }
}

fn emit_report(
    args: &Args,
    parameters: Value,
    seed: Option<u64>,
    results: Value,
    started: Instant,
    limits: &Limits,
) {
    if !args.json() {
        return;
    }
    let report = json!({
        "command": args.command,
        "parameters": parameters,
        "seed": seed,
        "results": results,
        "timings": { "total_ms": started.elapsed().as_secs_f64() * 1e3 },
        "guards": {
            "max_pairs": limits.max_pairs,
            "max_elements": limits.max_elements,
            "threads": limits.threads,
        },
    });
    outln!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
}

fn cmd_enumerate(args: &Args) -> Result<u8, CliError> {
    let started = Instant::now();
    let ctx = args.ctx()?;
    let radius: u32 = args.get("radius")?;
    let ball = args.switches.contains("ball");
    let limit: Option<u64> = args.get_opt("limit")?;
    let limits = args.limits()?;

    let stdout = std::io::stdout();
    let mut out = std::io::BufWriter::new(stdout.lock());
    let mut count: u64 = 0;
    let mut emit = |w: Word| -> bool {
        use std::io::Write;
        if let Some(k) = limit {
            if count >= k {
                return false;
            }
        }
        if !args.json() && writeln!(out, "{w}").is_err() {
            std::process::exit(0); // reader closed the pipe
        }
        count += 1;
        true
    };
    if ball {
        for w in iter_ball(&ctx, radius) {
            if !emit(w) {
                break;
            }
        }
    } else {
        for w in iter_sphere(&ctx, radius) {
            if !emit(w) {
                break;
            }
        }
    }
    drop(out);
    emit_report(
        args,
        json!({"n": ctx.rank(), "radius": radius, "ball": ball, "limit": limit}),
        None,
        json!({"count": count}),
        started,
        &limits,
    );
    Ok(0)
}

fn cmd_check(args: &Args) -> Result<u8, CliError> {
    let started = Instant::now();
    let path: String = args.get("in")?;
    let limits = args.limits()?;
    let set = read_ddc_file(Path::new(&path))?;
    let left = args.switches.contains("left");
    let sphere_fast = args.switches.contains("sphere-fast");
    // left differences of D are the right differences of D^{-1}
    let target = if left { set.inv_set() } else { set.clone() };

    let ok = if sphere_fast {
        target.sphere_condition_check()?
    } else {
        target.is_ddc(&limits)?
    };
    let diameter = if set.is_empty() {
        0
    } else if left {
        set.left_diameter()?
    } else {
        set.diameter()?
    };
    let kind = if left { "left DDC" } else { "DDC" };
    let method = if sphere_fast {
        "sphere-local condition"
    } else {
        "difference hashing"
    };
    let mut collision_json = Vec::new();
    if ok {
        if !args.json() {
            outln!(
                "{kind}: yes ({} elements, n={}, diameter {diameter}, via {method})",
                set.len(),
                set.ctx().rank()
            );
        }
    } else if sphere_fast {
        if !args.json() {
            outln!("{kind}: no (sphere-local condition violated)");
        }
    } else {
        let classes = target.find_repeats(&limits)?;
        if !args.json() {
            outln!(
                "{kind}: no — {} repeated difference(s), diameter {diameter}",
                classes.len()
            );
        }
        for class in &classes {
            if !args.json() {
                let pairs: Vec<String> = class
                    .pairs
                    .iter()
                    .map(|(g, h)| format!("({g}, {h})"))
                    .collect();
                outln!("  difference {}: {}", class.difference, pairs.join(" "));
            }
            collision_json.push(json!({
                "difference": class.difference.to_string(),
                "pairs": class.pairs.iter()
                    .map(|(g, h)| json!([g.to_string(), h.to_string()]))
                    .collect::<Vec<_>>(),
            }));
        }
    }
    emit_report(
        args,
        json!({"in": path, "left": left, "sphere_fast": sphere_fast}),
        None,
        json!({
            "is_ddc": ok,
            "elements": set.len(),
            "n": set.ctx().rank(),
            "diameter": diameter,
            "collisions": collision_json,
        }),
        started,
        &limits,
    );
    Ok(if ok { 0 } else { 1 })
}

fn cmd_construct(args: &Args) -> Result<u8, CliError> {
    let started = Instant::now();
    let variant = args
        .positional
        .first()
        .ok_or_else(|| CliError::usage("construct needs a variant: mirror or random"))?;
    let ctx = args.ctx()?;
    let d: u32 = args.get("d")?;
    let out: String = args.get("out")?;
    let limits = args.limits()?;
    match variant.as_str() {
        "mirror" => {
            let set = mirror(&ctx, d, &limits)?;
            write_ddc_file(Path::new(&out), &set)?;
            // the construction is a DDC by design; confirm when the pair
            // guard allows it
            let verified = match set.is_ddc(&limits) {
                Ok(b) => Some(b),
                Err(Error::ResourceLimit { .. }) => None,
                Err(e) => return Err(e.into()),
            };
            if !args.json() {
                outln!(
                    "mirror: {} elements of length {} written to {out} (verified: {})",
                    set.len(),
                    d / 2,
                    verified.map_or("skipped".into(), |b| b.to_string()),
                );
            }
            emit_report(
                args,
                json!({"variant": "mirror", "n": ctx.rank(), "d": d, "out": out}),
                None,
                json!({"size": set.len(), "verified": verified}),
                started,
                &limits,
            );
            if verified == Some(false) {
                return Err(CliError {
                    code: 1,
                    message: "mirror output failed verification".into(),
                });
            }
            Ok(0)
        }
        "random" => {
            let seed: u64 = args.get_or("seed", 0)?;
            let (set, report) = construct_lower(&ctx, d, seed, &limits)?;
            write_ddc_file(Path::new(&out), &set)?;
            if let Some(report_path) = args.flags.get("report") {
                let body = serde_json::to_string_pretty(&report).expect("serializable");
                std::fs::write(report_path, body).map_err(Error::from)?;
            }
            if !args.json() {
                outln!(
                    "random: |V|={} gamma={} events={} removed={} final={} (eta bound {}) -> {out}",
                    report.v_size,
                    report.gamma,
                    report.events_detected,
                    report.removed,
                    report.final_size,
                    report.eta_bound,
                );
            }
            emit_report(
                args,
                json!({"variant": "random", "n": ctx.rank(), "d": d, "out": out}),
                Some(seed),
                serde_json::to_value(&report).expect("serializable"),
                started,
                &limits,
            );
            Ok(0)
        }
        other => Err(CliError::usage(format!("unknown construct variant {other:?}"))),
    }
}

fn cmd_bounds(args: &Args) -> Result<u8, CliError> {
    let started = Instant::now();
    let ctx = args.ctx()?;
    let d: u32 = args.get("d")?;
    let gamma: Option<u32> = args.get_opt("gamma")?;
    let limits = args.limits()?;
    let bounds = bounds_report(&ctx, d, gamma);
    let value = bounds.to_json();
    if args.json() {
        emit_report(
            args,
            json!({"n": ctx.rank(), "d": d, "gamma": gamma}),
            None,
            value,
            started,
            &limits,
        );
    } else {
        outln!("n={} d={d}", ctx.rank());
        outln!("  |B_d(e)|        = {}", bounds.ball);
        outln!("  elementary      = {}  (largest m with m(m-1) <= |B_d|)", bounds.elementary);
        outln!("  subset_max      = {}  (largest diameter-d subset)", bounds.subset_max);
        if let Some(t) = &bounds.thm_upper {
            outln!("  thm_upper       = {}  (rounded up)", t.value.to_decimal_string());
            outln!("  thm_constant    = {}", t.constant.to_decimal_string());
        }
        if let Some(l) = &bounds.lower_formula {
            outln!(
                "  lower_formula   = {}  (rounded down{})",
                l.value.to_decimal_string(),
                if l.vacuous { ", vacuous: < 1" } else { "" },
            );
        }
        if let Some(eta) = &bounds.eta {
            outln!("  eta             = {eta}  (expected bad quadruples, exact)");
        }
        if let Some(m) = &bounds.mirror_size {
            outln!("  mirror_size     = {m}");
        }
    }
    Ok(0)
}

fn cmd_search(args: &Args) -> Result<u8, CliError> {
    let started = Instant::now();
    let ctx = args.ctx()?;
    let d: u32 = args.get("d")?;
    let limits = args.limits()?;
    let mut cfg = SearchConfig::new(ctx, d);
    cfg.limits = limits.clone();
    cfg.symmetry_pruning = !args.switches.contains("no-symmetry");
    cfg.node_budget = args.get_or("nodes", cfg.node_budget)?;
    cfg.time_budget = Duration::from_secs_f64(args.get_or("time", cfg.time_budget.as_secs_f64())?);
    let outcome = max_ddc_exact(&cfg)?;
    if let Some(path) = args.flags.get("witness-out") {
        write_ddc_file(Path::new(path), &outcome.witness)?;
    }
    if !args.json() {
        outln!(
            "m({}, {d}) {} {}  [nodes {}, cap {}, {:.3}s]",
            ctx.rank(),
            if outcome.proven_optimal { "=" } else { ">=" },
            outcome.size,
            outcome.nodes,
            outcome.cap,
            outcome.elapsed.as_secs_f64(),
        );
        for w in outcome.witness.elements() {
            outln!("  {w}");
        }
    }
    emit_report(
        args,
        json!({
            "n": ctx.rank(), "d": d,
            "symmetry": cfg.symmetry_pruning,
            "node_budget": cfg.node_budget,
            "time_budget_s": cfg.time_budget.as_secs_f64(),
        }),
        None,
        json!({
            "size": outcome.size,
            "proven_optimal": outcome.proven_optimal,
            "nodes": outcome.nodes,
            "cap": outcome.cap,
            "witness": outcome.witness.elements().iter().map(|w| w.to_string()).collect::<Vec<_>>(),
        }),
        started,
        &limits,
    );
    Ok(if outcome.proven_optimal { 0 } else { 3 })
}

fn cmd_lift(args: &Args) -> Result<u8, CliError> {
    let started = Instant::now();
    let group_arg: String = args.get("group")?;
    let set_arg: String = args.get("set")?;
    let d: u32 = args.get("d")?;
    let limits = args.limits()?;
    let oracle = if group_arg.starts_with("zmod") {
        GroupOracle::from_descriptor(&group_arg, &limits)?
    } else {
        let contents = std::fs::read_to_string(&group_arg).map_err(Error::from)?;
        GroupOracle::from_table_str(&contents)?
    };
    let ids: Vec<u64> = set_arg
        .split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| CliError::usage(format!("bad element id {s:?}")))
        })
        .collect::<Result<_, _>>()?;
    let lifted = lift(&oracle, &ids, d, &limits)?;
    if let Some(out) = args.flags.get("out") {
        write_ddc_file(Path::new(out), &lifted.set)?;
    }
    if !args.json() {
        outln!(
            "lifted {} elements into F_{}: group diameter {} (target d={d}), free diameter {} (bound 2d={})",
            lifted.set.len(),
            oracle.rank(),
            lifted.group_diameter,
            lifted.achieved_diameter,
            2 * d,
        );
        for w in &lifted.lifted_words {
            outln!("  {w}");
        }
    }
    emit_report(
        args,
        json!({"group": group_arg, "set": set_arg, "d": d}),
        None,
        json!({
            "size": lifted.set.len(),
            "group_diameter": lifted.group_diameter,
            "achieved_diameter": lifted.achieved_diameter,
            "diameter_bound": 2 * d,
            "words": lifted.lifted_words.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
        }),
        started,
        &limits,
    );
    Ok(0)
}

fn cmd_bench(args: &Args) -> Result<u8, CliError> {
    let started = Instant::now();
    let n: u16 = args.get_or("n", 2)?;
    let ctx = GroupCtx::new(n)?;
    let limits = args.limits()?;

    let t = Instant::now();
    let sphere_count = iter_sphere(&ctx, 10).count();
    let enum_s = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let mut rng = SplitMix64::new(1);
    let mut acc = 0usize;
    for _ in 0..200_000 {
        let a = Word::random_reduced(&ctx, 16, &mut rng);
        let b = Word::random_reduced(&ctx, 16, &mut rng);
        acc += a.mul(&b).len();
    }
    let mul_s = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let set = mirror(&ctx, 16, &limits)?;
    let is_ddc = set.is_ddc(&limits)?;
    let check_s = t.elapsed().as_secs_f64();

    if !args.json() {
        outln!("enumerate: S_10 ({sphere_count} words) in {enum_s:.3}s");
        outln!("multiply:  200000 products of length-16 words in {mul_s:.3}s (checksum {acc})");
        outln!(
            "check:     mirror d=16 ({} elements, {} pairs) in {check_s:.3}s (ddc: {is_ddc})",
            set.len(),
            set.len() * (set.len() - 1),
        );
    }
    emit_report(
        args,
        json!({"n": n}),
        None,
        json!({
            "enumerate_s10_words": sphere_count,
            "enumerate_s": enum_s,
            "mul_200k_s": mul_s,
            "check_mirror16_s": check_s,
        }),
        started,
        &limits,
    );
    Ok(0)
}

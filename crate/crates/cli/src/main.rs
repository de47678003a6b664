use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use oeg::bench::{
    emit_table, parse_removal_list, read_file, run_suite, Format, HumanSource, Instance, LoadError, SuiteConfig,
};
use oeg::model::diff;
use oeg::planner::{plan_optimal, validate, Plan};
use oeg::reconcile::{explain, verify_online, ExplainOptions, ReconcileError, ReconciliationProblem, Trace, Variant};

#[derive(Parser)]
#[command(
    name = "oeg",
    version,
    about = "Cost-optimal planning and online explanations for model reconciliation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the optimal plan of a task as JSON.
    Plan {
        #[command(flatten)]
        task: TaskArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the features each model has that the other lacks.
    Diff {
        #[command(flatten)]
        task: TaskArgs,
        #[command(flatten)]
        human: HumanArgs,
    },
    /// Explain the robot's plan to the human with one method.
    Explain {
        #[command(flatten)]
        task: TaskArgs,
        #[command(flatten)]
        human: HumanArgs,
        /// One of mce, mce-r, oeg-pp, oeg-na, oeg-ap.
        #[arg(long, default_value = "oeg-pp", value_parser = parse_variant)]
        method: Variant,
        /// Exact prefix-preserving search for oeg-pp.
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Robot plan to explain instead of the planner's (oeg-ap only).
        #[arg(long)]
        plan_file: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay a trace file and check the conditions of its method.
    Verify {
        #[command(flatten)]
        task: TaskArgs,
        #[command(flatten)]
        human: HumanArgs,
        #[arg(long)]
        trace: PathBuf,
        /// Robot plan the trace was made for, if not the planner's.
        #[arg(long)]
        plan_file: Option<PathBuf>,
    },
    /// Run a suite config and print a results table.
    Bench {
        #[arg(long)]
        config: PathBuf,
        /// csv, json or markdown.
        #[arg(long, default_value = "csv", value_parser = parse_format)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct TaskArgs {
    #[arg(long)]
    domain: PathBuf,
    #[arg(long)]
    problem: PathBuf,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct HumanArgs {
    /// Domain file of the human's model.
    #[arg(long)]
    human_domain: Option<PathBuf>,
    /// File of feature names to delete from the robot model, one per line.
    #[arg(long)]
    remove_features: Option<PathBuf>,
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    Variant::parse(s).ok_or_else(|| format!("unknown method {s:?}"))
}

fn parse_format(s: &str) -> Result<Format, String> {
    Format::parse(s).ok_or_else(|| format!("unknown format {s:?}"))
}

/// Error with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn config(message: impl ToString) -> Self {
        Failure {
            code: 2,
            message: message.to_string(),
        }
    }
}

impl From<ReconcileError> for Failure {
    fn from(e: ReconcileError) -> Self {
        let code = match e {
            ReconcileError::Model(_) => 2,
            ReconcileError::ExtraFeatures(_)
            | ReconcileError::InvalidRobotPlan { .. }
            | ReconcileError::NonOptimalRobotPlan { .. }
            | ReconcileError::NonCanonicalPlan
            | ReconcileError::ExactModeTooLarge { .. } => 3,
            ReconcileError::RobotUnsolvable
            | ReconcileError::NotReconcilable
            | ReconcileError::SearchExhausted { .. }
            | ReconcileError::Plan(_) => 4,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Self {
        match e {
            LoadError::Reconcile(r) => r.into(),
            other => Failure::config(other),
        }
    }
}

fn human_source(args: &HumanArgs) -> Result<HumanSource, Failure> {
    match (&args.human_domain, &args.remove_features) {
        (Some(h), None) => Ok(HumanSource::Domain(read_file(h)?)),
        (None, Some(r)) => Ok(HumanSource::Removals(parse_removal_list(&read_file(r)?))),
        _ => Err(Failure::config(
            "give exactly one of --human-domain and --remove-features",
        )),
    }
}

fn load(task: &TaskArgs, human: &HumanArgs) -> Result<Instance, Failure> {
    let domain = read_file(&task.domain)?;
    let problem = read_file(&task.problem)?;
    Ok(Instance::load(&domain, &problem, &human_source(human)?)?)
}

/// Reads a plan either as `{"actions": [...]}` JSON or as one action per
/// line, with or without surrounding parentheses.
fn read_plan(path: &Path, instance: &Instance) -> Result<Plan, Failure> {
    let text = read_file(path)?;
    let names: Vec<String> = if text.trim_start().starts_with('{') {
        let v: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
        v.get("actions")
            .and_then(|a| a.as_array())
            .ok_or_else(|| Failure::config(format!("{}: expected an \"actions\" array", path.display())))?
            .iter()
            .map(|a| {
                a.as_str()
                    .map(String::from)
                    .ok_or_else(|| Failure::config("plan actions must be strings"))
            })
            .collect::<Result<_, _>>()?
    } else {
        text.lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with(';'))
            .map(|l| {
                let l = l.trim_start_matches('(').trim_end_matches(')');
                l.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
            })
            .collect()
    };
    let u = instance.task.universe();
    let actions = u
        .actions_named(names.iter().map(String::as_str))
        .map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
    let t = &instance.task;
    let cost = validate(&t.model, &t.init, &t.goal, &actions).unwrap_or(0);
    Ok(Plan::new(actions, cost))
}

fn reconciliation(instance: &Instance, plan_file: Option<&Path>) -> Result<ReconciliationProblem, Failure> {
    match plan_file {
        None => Ok(instance.problem()?),
        Some(path) => {
            let plan = read_plan(path, instance)?;
            let t = &instance.task;
            Ok(ReconciliationProblem::new(
                t.model.clone(),
                instance.human.clone(),
                t.init.clone(),
                t.goal.clone(),
                plan,
            )?)
        }
    }
}

fn write_out(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::config(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Plan { task, out } => {
            let domain = read_file(&task.domain)?;
            let problem = read_file(&task.problem)?;
            let t = oeg::pddl::load_task(&domain, &problem).map_err(Failure::config)?;
            let plan = plan_optimal(&t.model, &t.init, &t.goal).ok_or(ReconcileError::RobotUnsolvable)?;
            write_out(out.as_deref(), &with_newline(plan.to_json(t.universe())))?;
        }
        Command::Diff { task, human } => {
            let instance = load(&task, &human)?;
            let d = diff(&instance.task.model, &instance.human).map_err(Failure::config)?;
            println!("{}", d.to_json());
        }
        Command::Explain {
            task,
            human,
            method,
            exact,
            seed,
            plan_file,
            out,
        } => {
            if plan_file.is_some() && method != Variant::Ap {
                return Err(Failure::config("--plan-file is only accepted with --method oeg-ap"));
            }
            let instance = load(&task, &human)?;
            let problem = reconciliation(&instance, plan_file.as_deref())?;
            let explanation = explain(&problem, method, ExplainOptions { seed, exact })?;
            let trace = Trace::new(&problem, &explanation);
            write_out(out.as_deref(), &with_newline(trace.to_json()))?;
        }
        Command::Verify {
            task,
            human,
            trace,
            plan_file,
        } => {
            let instance = load(&task, &human)?;
            let problem = reconciliation(&instance, plan_file.as_deref())?;
            let text = read_file(&trace)?;
            let trace = Trace::from_json(&text).map_err(|e| Failure::config(format!("{}: {e}", trace.display())))?;
            let explanation = trace
                .to_explanation(problem.robot().universe())
                .map_err(Failure::config)?;
            let report = verify_online(&problem, &explanation);
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            if !report.passed() {
                eprintln!("verification failed");
                return Ok(1);
            }
        }
        Command::Bench { config, format, out } => {
            let config = SuiteConfig::load(&config)?;
            let records = run_suite(&config);
            write_out(out.as_deref(), &emit_table(&records, format))?;
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

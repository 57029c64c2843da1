use crate::input::{read_column, read_pvalues};
use crate::{CurveArg, ModelArg, ParamArgs, SimulateArgs};
use multitest::fdp::{self, FdpParams};
use multitest::sim::{self, DiracUniformModel, Execution, GaussianModel, Generator, Metric};
use multitest::stepup::{self, BetaWeights, CurveKind, Pi0Estimator, RejectionCurve};
use multitest::{PValueFamily, Procedure};
use serde_json::json;
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

pub enum CliError {
    /// Bad input file or parameters; exit status 2.
    Input(String),
    /// Anything else; exit status 1.
    Internal(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Internal(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Internal(m) => m,
        }
    }
}

impl From<multitest::Error> for CliError {
    fn from(e: multitest::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| CliError::Internal(format!("{}: cannot write: {e}", p.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Internal(format!("cannot write to stdout: {e}"))),
    }
}

pub fn parse_estimator(spec: &str) -> Result<Pi0Estimator> {
    let bad = || CliError::Input(format!("invalid estimator {spec:?}: expected storey:<lambda>, quantile:<k0> or constant:<f>"));
    let (kind, value) = spec.split_once(':').ok_or_else(bad)?;
    Ok(match kind {
        "storey" => Pi0Estimator::Storey {
            lambda: value.parse().map_err(|_| bad())?,
        },
        "quantile" => Pi0Estimator::Quantile {
            k0: value.parse().map_err(|_| bad())?,
        },
        "constant" => Pi0Estimator::Constant {
            value: value.parse().map_err(|_| bad())?,
        },
        _ => return Err(bad()),
    })
}

pub fn build_procedure(id: &str, params: &ParamArgs) -> Result<Procedure> {
    let alpha = params.alpha;
    let gamma = params.gamma;
    Ok(match id {
        "reject-nothing" => Procedure::RejectNothing,
        "uncorrected" => Procedure::Uncorrected { alpha },
        "bonferroni" => Procedure::Bonferroni { alpha },
        "bh" => Procedure::BenjaminiHochberg { alpha },
        "by" => Procedure::BenjaminiYekutieli { alpha },
        "adaptive" => Procedure::Adaptive {
            alpha,
            estimator: parse_estimator(&params.estimator)?,
        },
        "one-stage" => {
            let kind = match params.curve {
                CurveArg::Br => CurveKind::BlanchardRoquain,
                CurveArg::Aorc => CurveKind::Aorc,
            };
            Procedure::OneStage {
                curve: RejectionCurve::new(kind, alpha)?,
            }
        }
        "beta" => {
            let path = params
                .weights
                .as_deref()
                .ok_or_else(|| CliError::Input("procedure beta needs --weights".into()))?;
            let weights = read_column(path).map_err(CliError::Input)?;
            Procedure::Beta {
                alpha,
                weights: BetaWeights::new(weights)?,
            }
        }
        "holm" => Procedure::Holm { alpha },
        "generalized-holm" => Procedure::GeneralizedHolm { alpha, k: params.k },
        "lehmann-romano" => Procedure::LehmannRomano { alpha, gamma },
        "quantile-binomial" => Procedure::QuantileBinomial { alpha, gamma },
        other => return Err(CliError::Input(format!("unknown procedure {other:?}"))),
    })
}

/// Parameters that the procedure actually reads, for the output record.
fn parameters(procedure: &Procedure, params: &ParamArgs) -> serde_json::Value {
    let mut out = serde_json::Map::new();
    if !matches!(procedure, Procedure::RejectNothing) {
        out.insert("alpha".into(), json!(params.alpha));
    }
    match procedure {
        Procedure::LehmannRomano { .. } | Procedure::QuantileBinomial { .. } => {
            out.insert("gamma".into(), json!(params.gamma));
        }
        Procedure::GeneralizedHolm { k, .. } => {
            out.insert("k".into(), json!(k));
        }
        Procedure::Adaptive { .. } => {
            out.insert("estimator".into(), json!(params.estimator));
        }
        Procedure::OneStage { curve } => {
            let name = match curve.kind {
                CurveKind::BlanchardRoquain => "br",
                CurveKind::Aorc => "aorc",
            };
            out.insert("curve".into(), json!(name));
        }
        Procedure::Beta { .. } => {
            let path = params.weights.as_deref().map(|p| p.display().to_string());
            out.insert("weights".into(), json!(path));
        }
        _ => {}
    }
    serde_json::Value::Object(out)
}

pub fn reject(id: &str, params: &ParamArgs, input: &Path, output: Option<&Path>) -> Result<()> {
    let values = read_pvalues(input).map_err(CliError::Input)?;
    let family = PValueFamily::new(values)?;
    let procedure = build_procedure(id, params)?;
    let outcome = procedure.apply(&family)?;
    let record = json!({
        "procedure": procedure.id(),
        "parameters": parameters(&procedure, params),
        "m": family.m(),
        "threshold": outcome.rejections.threshold(),
        "rejected": outcome.rejections.indices(),
        "count": outcome.rejections.len(),
        "warning": outcome.warning.map(|w| w.code()),
    });
    write_output(output, &format!("{record}\n"))
}

pub fn aggregate(gamma: f64, input: &Path, output: Option<&Path>) -> Result<()> {
    let family = PValueFamily::new(read_pvalues(input).map_err(CliError::Input)?)?;
    let p = stepup::aggregate_pvalues(&family, gamma)?;
    let record = json!({ "gamma": gamma, "m": family.m(), "pvalue": p });
    write_output(output, &format!("{record}\n"))
}

pub fn thresholds(m: usize, gamma: f64, alpha: f64, output: Option<&Path>) -> Result<()> {
    let params = FdpParams::new(m, gamma, alpha)?;
    let columns = [
        fdp::lr_thresholds(&params),
        fdp::hoeffding_bennett_thresholds(&params),
        fdp::q_thresholds(&params),
        fdp::bh_curve(m, gamma)?,
        fdp::gavrilov_thresholds(m, gamma)?,
    ];
    let mut text = String::from("l,t_lr,t_q_prime,t_q,bh,gavrilov\n");
    for l in 1..=m {
        write!(text, "{l}").expect("write to string");
        for c in &columns {
            write!(text, ",{}", c.at(l)).expect("write to string");
        }
        text.push('\n');
    }
    write_output(output, &text)
}

pub fn parse_metric(spec: &str, params: &ParamArgs) -> Result<Metric> {
    let metric = match spec {
        "fdr" => Metric::Fdr,
        "fwer" => Metric::Kfwer(1),
        "kfwer" => Metric::Kfwer(params.k),
        "fdp-tail" => Metric::FdpTail(params.gamma),
        other => {
            return Err(CliError::Input(format!(
                "unknown metric {other:?}: expected fdr, fwer, kfwer or fdp-tail"
            )))
        }
    };
    metric.validate()?;
    Ok(metric)
}

pub fn simulate(args: &SimulateArgs) -> Result<()> {
    let (model_name, generator): (&str, Box<dyn Generator>) = match args.model {
        ModelArg::Gaussian => (
            "gaussian",
            Box::new(GaussianModel::new(args.m, args.m0, args.rho, args.tau, args.seed)?),
        ),
        ModelArg::DiracUniform => (
            "dirac-uniform",
            Box::new(DiracUniformModel::new(args.m, args.m0, args.seed)?),
        ),
    };
    let metrics = args
        .metric
        .iter()
        .map(|s| parse_metric(s, &args.params))
        .collect::<Result<Vec<_>>>()?;
    let procedures = args
        .procedure
        .iter()
        .map(|id| build_procedure(id, &args.params)?.prepare(args.m).map_err(CliError::from))
        .collect::<Result<Vec<_>>>()?;
    let execution = if args.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let mut text = String::from(
        "procedure,m,m0,rho,tau,alpha,gamma,k,N,metric,estimate,std_error,model,seed\n",
    );
    for prepared in &procedures {
        for metric in &metrics {
            let e = sim::estimate(
                |f| prepared.rejections(f),
                *metric,
                generator.as_ref(),
                args.replicates,
                execution,
            )?;
            let (rho, tau) = match args.model {
                ModelArg::Gaussian => (args.rho.to_string(), args.tau.to_string()),
                ModelArg::DiracUniform => (String::new(), String::new()),
            };
            writeln!(
                text,
                "{},{},{},{rho},{tau},{},{},{},{},{},{},{},{model_name},{}",
                prepared.procedure().id(),
                args.m,
                args.m0,
                args.params.alpha,
                args.params.gamma,
                args.params.k,
                args.replicates,
                metric.name(),
                e.estimate,
                e.std_error,
                args.seed
            )
            .expect("write to string");
        }
    }
    write_output(args.output.as_deref(), &text)
}

//! Drivers behind the `procontra` binary: argument handling, fixture
//! loading, and JSON reports.

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use procontra::coefficients::{Backend, BackendKind};
use procontra::contra::{is_flat_to_depth, ContraLiteral};
use procontra::duality::adic_example;
use procontra::homotopy::{
    db_coh_hom_oracle, group_report, hom_contraderived, null_homotopy_to_depth, periodicity_check_projective_cocycles,
    pure_acyclicity_test, random_chain_map, random_free_complex, xi, ComplexLiteral, ContraComplex, FreeComplexLiteral,
};
use procontra::pro_cat::product_check;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Z,
    Padic,
    Pseries,
}

#[derive(Debug, Parser)]
#[command(name = "procontra", version, about = "Exact checks for pro-objects, contramodules and the functor Xi")]
pub struct Cli {
    /// Coefficient backend; defaults to the fixture's, or padic.
    #[arg(long, global = true, value_enum)]
    pub backend: Option<BackendArg>,
    /// Prime of the backend; defaults to the fixture's, or 2.
    #[arg(long, global = true)]
    pub prime: Option<u64>,
    #[arg(long, global = true, default_value_t = 4)]
    pub depth: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true)]
    pub fixture: Option<PathBuf>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, Subcommand)]
pub enum Command {
    /// The reduction ℤ → (ℤ/pⁿ)ₙ: strict kernel and pro-contratensor with ℚ.
    ExamplePadic,
    /// Hom from Ξ(N•) to Ξ(M•) two ways, against Hom(M•, N•) in D^b(coh).
    XiHom,
    /// Flatness of a contramodule against the battery.
    Flatness,
    /// Projective cocycles and null-homotopies for a pure-acyclic complex of free contramodules.
    Periodicity,
    /// Universal property, exactness and finite factorization of products.
    ProductCheck,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::ExamplePadic => "example-padic",
            Command::XiHom => "xi-hom",
            Command::Flatness => "flatness",
            Command::Periodicity => "periodicity",
            Command::ProductCheck => "product-check",
        }
    }
}

/// Input errors: bad flags, unreadable or malformed fixtures.
#[derive(Debug)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<procontra::Error> for InputError {
    fn from(e: procontra::Error) -> Self {
        InputError(e.to_string())
    }
}

fn schema_error(pointer: &str, message: impl fmt::Display) -> InputError {
    procontra::Error::Schema { pointer: pointer.to_string(), message: message.to_string() }.into()
}

/// Validated flags.
#[derive(Clone, Debug)]
pub struct RunConfig {
    /// Backend named by `--backend`, with the prime applied.
    pub backend: Option<Backend>,
    pub prime: u64,
    /// Whether `--prime` was given.
    pub explicit_prime: bool,
    pub depth: usize,
    pub seed: u64,
    pub fixture: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Result<RunConfig, InputError> {
        if cli.depth == 0 {
            return Err(InputError("--depth must be at least 1".into()));
        }
        let prime = cli.prime.unwrap_or(2);
        // validates the prime even for the discrete backend, whose examples use it
        let padic = Backend::padic(prime)?;
        let backend = match cli.backend {
            None => None,
            Some(BackendArg::Z) => Some(Backend::discrete_integers()),
            Some(BackendArg::Pseries) => Some(Backend::power_series(prime)?),
            Some(BackendArg::Padic) => Some(padic),
        };
        Ok(RunConfig {
            backend,
            prime,
            explicit_prime: cli.prime.is_some(),
            depth: cli.depth,
            seed: cli.seed,
            fixture: cli.fixture.clone(),
            out: cli.out.clone(),
        })
    }

    fn backend_or_default(&self) -> Backend {
        self.backend.unwrap_or_else(|| Backend::padic(self.prime).expect("validated prime"))
    }

    /// The fixture's backend, checked against the flags that were given.
    fn reconcile(&self, fixture: Backend, pointer: &str) -> Result<Backend, InputError> {
        let fixture = fixture.validated().map_err(|e| schema_error(pointer, e))?;
        let clash = match self.backend {
            Some(b) => !same_backend(&b, &fixture),
            None => self.explicit_prime && !fixture.is_discrete() && fixture.prime != self.prime,
        };
        if clash {
            return Err(InputError(format!(
                "the fixture's backend {} does not match the command line (--backend/--prime)",
                backend_name(&fixture)
            )));
        }
        Ok(fixture)
    }

    fn fixture_path(&self) -> Result<&Path, InputError> {
        self.fixture.as_deref().ok_or_else(|| InputError("this command needs --fixture PATH".into()))
    }
}

fn same_backend(a: &Backend, b: &Backend) -> bool {
    a.kind == b.kind && (a.is_discrete() || a.prime == b.prime)
}

pub fn backend_name(b: &Backend) -> String {
    match b.kind {
        BackendKind::DiscreteIntegers => "z".to_string(),
        BackendKind::PAdic => format!("padic({})", b.prime),
        BackendKind::PowerSeries => format!("pseries({})", b.prime),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    fn of(pass: bool) -> Verdict {
        if pass {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// The JSON report. `depth` is the certified depth of the verdict.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub verdict: Verdict,
    pub depth: Option<usize>,
    pub requested_depth: usize,
    pub backend: String,
    pub seed: u64,
    pub battery: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    pub result: Value,
    #[serde(skip)]
    pub summary: String,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

/// RFC 6901 pointer for a deserialization path.
fn json_pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => out.push_str(&format!("/{}", key.replace('~', "~0").replace('/', "~1"))),
            Segment::Enum { .. } | Segment::Unknown => {}
        }
    }
    out
}

/// Reads a fixture, reporting parse failures with the JSON pointer of the
/// offending value.
pub fn load_fixture<T: DeserializeOwned>(path: &Path, schema: &str) -> Result<T, InputError> {
    let text = fs::read_to_string(path).map_err(|e| InputError(format!("cannot read {}: {e}", path.display())))?;
    let head: Value = serde_json::from_str(&text).map_err(|e| schema_error("", e))?;
    match head.get("schema").and_then(Value::as_str) {
        Some(s) if s == schema => {}
        Some(s) => return Err(schema_error("/schema", format!("expected {schema:?}, found {s:?}"))),
        None => return Err(schema_error("/schema", format!("missing; expected {schema:?}"))),
    }
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| schema_error(&json_pointer(e.path()), e.inner()))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XiHomFixture {
    pub schema: String,
    pub m: ComplexLiteral,
    pub n: ComplexLiteral,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlatnessFixture {
    pub schema: String,
    pub coefficient: ContraLiteral,
    #[serde(default = "yes")]
    pub expect_flat: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeriodicityFixture {
    pub schema: String,
    pub complex: FreeComplexLiteral,
    /// Source of the test chain map; a seeded random free complex when absent.
    #[serde(default)]
    pub source: Option<FreeComplexLiteral>,
}

fn yes() -> bool {
    true
}

pub const XI_HOM_SCHEMA: &str = "procontra/xi-hom/v1";
pub const FLATNESS_SCHEMA: &str = "procontra/flatness/v1";
pub const PERIODICITY_SCHEMA: &str = "procontra/periodicity/v1";

fn example_padic(cfg: &RunConfig) -> Result<Report, InputError> {
    if let Some(b) = cfg.backend.filter(|b| !b.is_discrete()) {
        return Err(InputError(format!("example-padic runs over z, not {}", backend_name(&b))));
    }
    let r = adic_example(cfg.prime, cfg.depth)?;
    let pass = r.pass();
    Ok(Report {
        command: Command::ExamplePadic.name(),
        verdict: Verdict::of(pass),
        depth: r.kernel_certificate.depth().or(Some(cfg.depth)),
        requested_depth: cfg.depth,
        backend: backend_name(&Backend::discrete_integers()),
        seed: cfg.seed,
        battery: json!({ "towers": ["Z", format!("Z/{}^n", cfg.prime)], "coefficient": "Q", "levels": cfg.depth }),
        witness: (!pass).then(|| to_value(&r.mismatches)),
        summary: format!(
            "ker_strict(g) = {}; E ⊙^pro Q rank {}; D ⊙^pro Q rank {}; ker(g ⊙^pro Q) rank {}",
            if r.kernel_strict_zero { "0" } else { "nonzero" },
            rank_text(r.adic_limit_rank),
            rank_text(r.constant_limit_rank),
            r.limit_map.kernel_rank
        ),
        result: to_value(&r),
    })
}

fn rank_text(r: Option<usize>) -> String {
    r.map_or_else(|| "unsettled".into(), |r| r.to_string())
}

fn xi_hom(cfg: &RunConfig) -> Result<Report, InputError> {
    let fx: XiHomFixture = load_fixture(cfg.fixture_path()?, XI_HOM_SCHEMA)?;
    let bm = cfg.reconcile(fx.m.backend, "/m/backend")?;
    let bn = cfg.reconcile(fx.n.backend, "/n/backend")?;
    if !same_backend(&bm, &bn) {
        return Err(schema_error("/n/backend", "m and n must share a backend"));
    }
    let m = fx.m.into_complex().map_err(|e| schema_error("/m", e))?;
    let n = fx.n.into_complex().map_err(|e| schema_error("/n", e))?;
    let h = hom_contraderived(&n, &xi(&m)?, cfg.depth)?;
    let oracle = db_coh_hom_oracle(&m, &n)?;
    let pass = h.agree && h.path_i.is_isomorphic(&oracle) && h.path_ii.is_isomorphic(&oracle);
    let groups = json!({
        "path_i": group_report(&h.path_i),
        "path_ii": group_report(&h.path_ii),
        "oracle": group_report(&oracle),
    });
    Ok(Report {
        command: Command::XiHom.name(),
        verdict: Verdict::of(pass),
        depth: h.certified_depth,
        requested_depth: cfg.depth,
        backend: backend_name(&bm),
        seed: cfg.seed,
        battery: json!({
            "start_depth": h.start_depth,
            "max_extra_depth": cfg.depth,
            "paths": ["pro-contratensor of the resolution", "contratensor bicomplex", "kernel-resolution oracle"],
        }),
        witness: (!pass).then(|| groups.clone()),
        summary: format!(
            "path (i) {}, path (ii) {}, oracle {}",
            h.path_i.describe(),
            h.path_ii.describe(),
            oracle.describe()
        ),
        result: json!({ "contraderived": to_value(&h.report()), "oracle": group_report(&oracle), "certificate": to_value(&h.certificate) }),
    })
}

fn flatness(cfg: &RunConfig) -> Result<Report, InputError> {
    let fx: FlatnessFixture = load_fixture(cfg.fixture_path()?, FLATNESS_SCHEMA)?;
    let backend = match &fx.coefficient {
        ContraLiteral::Free { backend, .. } => Some(cfg.reconcile(*backend, "/coefficient/backend")?),
        ContraLiteral::Reductions { module } => Some(cfg.reconcile(module.backend, "/coefficient/module/backend")?),
        ContraLiteral::Tower { tower } => Some(cfg.reconcile(tower.backend, "/coefficient/tower/backend")?),
        ContraLiteral::Rationals => None,
    };
    let q = fx.coefficient.into_coefficient(cfg.depth).map_err(|e| schema_error("/coefficient", e))?;
    let cert = is_flat_to_depth(&q, cfg.depth)?;
    let pass = cert.pass == fx.expect_flat;
    Ok(Report {
        command: Command::Flatness.name(),
        verdict: Verdict::of(pass),
        depth: Some(cert.depth),
        requested_depth: cfg.depth,
        backend: backend.map_or_else(|| backend_name(&Backend::discrete_integers()), |b| backend_name(&b)),
        seed: cfg.seed,
        battery: to_value(&cert.battery),
        witness: if pass { None } else { Some(cert.witness.as_ref().map_or(json!({ "flat": cert.pass }), to_value)) },
        summary: format!("{} to depth {} (expected {})", if cert.pass { "flat" } else { "not flat" }, cert.depth, if fx.expect_flat { "flat" } else { "not flat" }),
        result: to_value(&cert),
    })
}

fn periodicity(cfg: &RunConfig) -> Result<Report, InputError> {
    let fx: PeriodicityFixture = load_fixture(cfg.fixture_path()?, PERIODICITY_SCHEMA)?;
    let backend = cfg.reconcile(fx.complex.backend, "/complex/backend")?;
    if backend.is_discrete() {
        return Err(schema_error("/complex/backend", "periodicity needs a tower backend (padic or pseries)"));
    }
    let f = fx.complex.into_complex().map_err(|e| schema_error("/complex", e))?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let p = match &fx.source {
        Some(s) => {
            cfg.reconcile(s.backend, "/source/backend")?;
            s.into_complex().map_err(|e| schema_error("/source", e))?
        }
        None => random_free_complex(&mut rng, &backend, 3, 2),
    };
    let pure = pure_acyclicity_test(&ContraComplex(f.clone()), cfg.depth, cfg.seed)?;
    let base = Report {
        command: Command::Periodicity.name(),
        verdict: Verdict::Fail,
        depth: None,
        requested_depth: cfg.depth,
        backend: backend_name(&backend),
        seed: cfg.seed,
        battery: to_value(&pure.battery),
        witness: None,
        summary: String::new(),
        result: Value::Null,
    };
    if !pure.pass {
        return Ok(Report {
            witness: Some(json!({ "pure_acyclicity": pure.witness })),
            summary: "not pure-acyclic to the requested depth; the periodicity theorems do not apply".into(),
            result: json!({ "pure_acyclicity": to_value(&pure) }),
            ..base
        });
    }
    let cert = periodicity_check_projective_cocycles(&ContraComplex(f.clone()), cfg.depth)?;
    let map = random_chain_map(&mut rng, &p, &f)?;
    let h = null_homotopy_to_depth(&map, cfg.depth)?;
    let pass = cert.certified && h.is_some();
    let homotopy = h.as_ref().map(|h| {
        h.components.iter().map(|(i, m)| json!({ "degree": i, "matrix": to_value(m) })).collect::<Vec<_>>()
    });
    Ok(Report {
        verdict: Verdict::of(pass),
        depth: pass.then_some(cert.depth),
        witness: (!pass).then(|| {
            json!({
                "counterexample": cert.counterexample,
                "null_homotopy_found": h.is_some(),
            })
        }),
        summary: format!(
            "cocycles {} projective; null-homotopy {}",
            if cert.certified { "certified" } else { "not certified" },
            if h.is_some() { "found" } else { "not found" }
        ),
        result: json!({
            "pure_acyclicity": to_value(&pure),
            "cocycles": to_value(&cert),
            "chain_map_source": to_value(&p.to_literal()),
            "null_homotopy": homotopy,
        }),
        ..base
    })
}

fn product(cfg: &RunConfig) -> Result<Report, InputError> {
    let backend = cfg.backend_or_default();
    let r = product_check(&backend, cfg.seed, cfg.depth)?;
    let pass = r.pass();
    Ok(Report {
        command: Command::ProductCheck.name(),
        verdict: Verdict::of(pass),
        depth: Some(cfg.depth),
        requested_depth: cfg.depth,
        backend: backend_name(&backend),
        seed: cfg.seed,
        battery: json!({
            "product_factors": to_value(&r.factors),
            "source_rank": r.source_rank,
            "ses_products": 1,
            "factorization_copies": r.factorization.copies,
        }),
        witness: (!pass).then(|| to_value(&r)),
        summary: format!(
            "universal property {}, product of sequences {}, least subproduct {} (expected {})",
            if r.universal_property { "holds" } else { "fails" },
            if r.admissible_product { "admissible" } else { "not admissible" },
            r.factorization.m,
            r.factorization.expected_m
        ),
        result: to_value(&r),
    })
}

pub fn execute(cli: &Cli) -> Result<Report, InputError> {
    let cfg = RunConfig::from_cli(cli)?;
    match cli.command {
        Command::ExamplePadic => example_padic(&cfg),
        Command::XiHom => xi_hom(&cfg),
        Command::Flatness => flatness(&cfg),
        Command::Periodicity => periodicity(&cfg),
        Command::ProductCheck => product(&cfg),
    }
}

pub fn render(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
    s.push('\n');
    s
}

/// Runs the command line and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
        }
    };
    let report = match execute(&cli) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_INPUT;
        }
    };
    let text = render(&report);
    match &cli.out {
        Some(path) => {
            if let Err(e) = fs::write(path, &text) {
                let _ = writeln!(stderr, "error: cannot write {}: {e}", path.display());
                return EXIT_INPUT;
            }
        }
        None => {
            let _ = stdout.write_all(text.as_bytes());
        }
    }
    let verdict = match report.verdict {
        Verdict::Pass => "pass",
        Verdict::Fail => "FAIL",
    };
    let _ = writeln!(stderr, "{}: {verdict}: {}", report.command, report.summary);
    match report.verdict {
        Verdict::Pass => EXIT_PASS,
        Verdict::Fail => EXIT_MISMATCH,
    }
}

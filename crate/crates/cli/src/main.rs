//! `fatf`: JSON front end for fixed-subgroup computations in `Z^m x F_n`.

use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

use fatf::bounds::constants;
use fatf::fixpoint::{
    autofixed_closure, fix_tuple, is_autofixed, periodic_exponent, periodic_subgroup,
};
use fatf::oracle::{brute_fixed, Bounds};
use fatf::serial::{BasisJson, ElementJson, FixResultJson, MorphismJson, StoredFixResult};
use fatf::{Ambient, FixInput, Morphism, Word};

const EXIT_VALIDATION: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_MALFORMED: u8 = 65;

#[derive(Parser, Debug)]
#[command(
    name = "fatf",
    version,
    about = "Fixed subgroups of endomorphisms of Z^m x F_n"
)]
struct Cli {
    /// Abelian rank m.
    #[arg(long, global = true)]
    m: Option<usize>,
    /// Free rank n.
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Request file; stdin when absent.
    #[arg(long, short, global = true)]
    input: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Basis of the subgroup generated by {"generators": [...]}.
    Basis,
    /// Membership: {"subgroup": {...}, "element": {...}}.
    Member,
    /// Fixed subgroup of {"morphisms": [...], "fixed_bases"?: [[...]]}.
    Fix,
    /// Periodic subgroup of {"morphism": {...}}.
    Per,
    /// Order of {"morphism": {...}}.
    Order,
    /// Auto-fixed closure: {"subgroup": {...}, "morphisms": [...], "fixed_bases"?: [[...]]}.
    Closure,
    /// Uniform constants for the ambient.
    Constants,
    /// Brute-force fixed elements of {"morphisms": [...]} and containment in a result.
    OracleCheck {
        /// Stored `fix` output to check against; computed when absent.
        #[arg(long)]
        result: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        word_len: usize,
        #[arg(long, default_value_t = 2)]
        coord: u64,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneratorsRequest {
    generators: Vec<ElementJson>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MemberRequest {
    subgroup: BasisJson,
    element: ElementJson,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TupleRequest {
    morphisms: Vec<MorphismJson>,
    #[serde(default)]
    fixed_bases: Option<Vec<Vec<String>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MorphismRequest {
    morphism: MorphismJson,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ClosureRequest {
    subgroup: BasisJson,
    morphisms: Vec<MorphismJson>,
    #[serde(default)]
    fixed_bases: Option<Vec<Vec<String>>>,
}

enum Failure {
    Usage(String),
    Malformed(String),
    Validation(String),
}

impl From<fatf::Error> for Failure {
    fn from(e: fatf::Error) -> Self {
        Failure::Validation(e.to_string())
    }
}

type Outcome = Result<Value, Failure>;

fn read_input(path: Option<&PathBuf>) -> Result<String, Failure> {
    let mut text = String::new();
    match path {
        Some(p) => {
            text = std::fs::read_to_string(p)
                .map_err(|e| Failure::Validation(format!("cannot read {}: {e}", p.display())))?
        }
        None => {
            std::io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| Failure::Validation(format!("cannot read stdin: {e}")))?;
        }
    }
    Ok(text)
}

fn parse<T: DeserializeOwned>(text: &str) -> Result<T, Failure> {
    let value: Value = serde_json::from_str(text).map_err(|e| Failure::Malformed(e.to_string()))?;
    serde_json::from_value(value).map_err(|e| Failure::Validation(e.to_string()))
}

fn tuple_input(
    ambient: Ambient,
    morphisms: &[MorphismJson],
    fixed_bases: Option<&[Vec<String>]>,
) -> Result<FixInput, Failure> {
    let morphisms = morphisms
        .iter()
        .map(|m| m.to_morphism(ambient))
        .collect::<fatf::Result<Vec<Morphism>>>()?;
    let input = match fixed_bases {
        Some(bases) => {
            let bases = bases
                .iter()
                .map(|b| b.iter().map(|w| Word::parse(w, ambient.n)).collect())
                .collect::<fatf::Result<Vec<Vec<Word>>>>()?;
            FixInput::new(morphisms, bases)?
        }
        None => FixInput::from_catalog(morphisms)?,
    };
    Ok(input)
}

fn fix_json(r: &fatf::FixResult) -> Value {
    serde_json::to_value(FixResultJson::from_result(r)).expect("serializable")
}

fn execute(cli: &Cli) -> Outcome {
    let ambient = || -> Result<Ambient, Failure> {
        match (cli.m, cli.n) {
            (Some(m), Some(n)) => Ok(Ambient::new(m, n)),
            _ => Err(Failure::Usage("both --m and --n are required".into())),
        }
    };
    let body = || read_input(cli.input.as_ref());
    match &cli.command {
        Command::Constants => {
            let amb = ambient()?;
            let report = constants(amb.m as u64, amb.n as u64);
            Ok(json!({"ok": true, "constants": report}))
        }
        Command::Basis => {
            let amb = ambient()?;
            let req: GeneratorsRequest = parse(&body()?)?;
            let gens = req
                .generators
                .iter()
                .map(|g| g.to_element(amb))
                .collect::<fatf::Result<Vec<_>>>()?;
            let h = fatf::SubgroupBasis::from_generators(amb, &gens)?;
            Ok(json!({"ok": true, "basis": BasisJson::from_basis(&h)}))
        }
        Command::Member => {
            let amb = ambient()?;
            let req: MemberRequest = parse(&body()?)?;
            let h = req.subgroup.to_basis(amb)?;
            let g = req.element.to_element(amb)?;
            Ok(json!({"ok": true, "member": h.member(&g)?}))
        }
        Command::Fix => {
            let amb = ambient()?;
            let req: TupleRequest = parse(&body()?)?;
            let input = tuple_input(amb, &req.morphisms, req.fixed_bases.as_deref())?;
            Ok(json!({"ok": true, "result": fix_json(&fix_tuple(&input)?)}))
        }
        Command::Per => {
            let amb = ambient()?;
            let req: MorphismRequest = parse(&body()?)?;
            let psi = req.morphism.to_morphism(amb)?;
            let e = periodic_exponent(&psi)?;
            let r = periodic_subgroup(&psi)?;
            Ok(json!({"ok": true, "exponent": e.to_string(), "result": fix_json(&r)}))
        }
        Command::Order => {
            let amb = ambient()?;
            let req: MorphismRequest = parse(&body()?)?;
            let psi = req.morphism.to_morphism(amb)?;
            Ok(json!({"ok": true, "order": psi.order()?.to_string()}))
        }
        Command::Closure => {
            let amb = ambient()?;
            let req: ClosureRequest = parse(&body()?)?;
            let h = req.subgroup.to_basis(amb)?;
            let input = tuple_input(amb, &req.morphisms, req.fixed_bases.as_deref())?;
            let closure = autofixed_closure(&h, &input)?;
            let auto = is_autofixed(&h, &input)?;
            Ok(json!({"ok": true, "autofixed": auto, "result": fix_json(&closure)}))
        }
        Command::OracleCheck {
            result,
            word_len,
            coord,
        } => {
            let amb = ambient()?;
            let req: TupleRequest = parse(&body()?)?;
            let input = tuple_input(amb, &req.morphisms, req.fixed_bases.as_deref())?;
            let basis = match result {
                Some(path) => {
                    let text = read_input(Some(path))?;
                    let stored: Value = parse(&text)?;
                    // accept both a bare result and the full `fix` response
                    let inner = stored.get("result").cloned().unwrap_or(stored);
                    let stored: StoredFixResult = serde_json::from_value(inner)
                        .map_err(|e| Failure::Validation(e.to_string()))?;
                    stored.basis.map(|b| b.to_basis(amb)).transpose()?
                }
                None => fix_tuple(&input)?.basis,
            };
            let bounds = Bounds::new(*word_len, *coord);
            let fixed = brute_fixed(amb, input.morphisms(), bounds)?;
            let contained = match &basis {
                Some(h) => {
                    let mut all = true;
                    for g in &fixed {
                        all &= h.member(g)?;
                    }
                    Value::Bool(all)
                }
                None => Value::Null,
            };
            let fixed: Vec<ElementJson> = fixed.iter().map(ElementJson::from_element).collect();
            Ok(json!({"ok": true, "contained": contained, "fixed": fixed}))
        }
    }
}

fn emit(value: &Value) {
    let mut out = std::io::stdout().lock();
    // a closed pipe is not worth a panic
    let _ = writeln!(out, "{value}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            emit(&json!({"ok": false, "error": e.kind().to_string()}));
            eprint!("{e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match execute(&cli) {
        Ok(v) => {
            emit(&v);
            ExitCode::SUCCESS
        }
        Err(f) => {
            let (code, msg) = match f {
                Failure::Usage(m) => (EXIT_USAGE, m),
                Failure::Malformed(m) => (EXIT_MALFORMED, m),
                Failure::Validation(m) => (EXIT_VALIDATION, m),
            };
            emit(&json!({"ok": false, "error": msg}));
            ExitCode::from(code)
        }
    }
}

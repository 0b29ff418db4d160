//! Subcommands of the `symcone` binary.
use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use symcone::conemodel::{
    facet_through, gift_wrap, reduce_to_pointed_fulldim, ridges_of, Cone, Facet,
};
use symcone::decomp::{convert, total_facets, Bank, ConversionTask, Method, Policy};
use symcone::exactlin::{primitive_integer, Rational, RationalMatrix};
use symcone::orbits::{fuse, split};
use symcone::permgrp::{PermGroup, Permutation};
use symcone::symdetect::restricted_automorphism_group;
use symcone::FaceSet;
use thiserror::Error;

use crate::format::{
    parse_face_list, parse_group_file, parse_perturbation_file, render_face_list,
    render_group_file, InputDocument, ParseError, Representation, FORMAT_HEADER,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] symcone::Error),
    #[error("{0}")]
    Usage(String),
    #[error("check failed: {0}")]
    Check(String),
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "symcone",
    version,
    about = "Polyhedral representation conversion up to symmetry"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Facet orbit representatives of a V-representation (or vertex orbits
    /// of an H-representation).
    Facets(FacetsArgs),
    /// Restricted automorphism group of the input rows.
    Automorphisms(AutomorphismsArgs),
    /// Verify a claimed list of facet orbit representatives.
    Check(CheckArgs),
    /// Fuse or split a face list between two groups.
    Orbits(OrbitsArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Incidence,
    Adjacency,
    Cascade,
    Pivot,
    Direct,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Incidence => Method::Incidence,
            MethodArg::Adjacency => Method::Adjacency,
            MethodArg::Cascade => Method::Cascade,
            MethodArg::Pivot => Method::Pivot,
            MethodArg::Direct => Method::Direct,
        }
    }
}

#[derive(Debug, Args)]
pub struct GroupArgs {
    /// Group file: one 1-based cycle-notation permutation per line.
    #[arg(long)]
    pub group: Option<PathBuf>,
    /// Compute the restricted automorphism group when no group is given.
    #[arg(long)]
    pub detect_group: bool,
    /// Accept the given group without checking that it acts linearly.
    #[arg(long)]
    pub trust_group: bool,
}

#[derive(Debug, Args)]
pub struct FacetsArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[command(flatten)]
    pub group: GroupArgs,
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    /// Subproblems with at most this many rays are solved directly.
    #[arg(long)]
    pub recursion_base: Option<usize>,
    #[arg(long)]
    pub max_depth: Option<usize>,
    /// Perturbation spec file for the pivot method.
    #[arg(long)]
    pub perturb: Option<PathBuf>,
    #[arg(long)]
    pub no_balinski: bool,
    #[arg(long)]
    pub no_pruning: bool,
    /// Bank file, read if present and rewritten afterwards.
    #[arg(long)]
    pub bank: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    /// Explicit lift order for the cascade method, as 1-based rows.
    #[arg(long, value_delimiter = ',')]
    pub lift_order: Option<Vec<usize>>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Orbit report; defaults to `<out>.orbits`, or standard error.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AutomorphismsArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Claimed representatives in the dual representation.
    #[arg(long)]
    pub facets: PathBuf,
    #[command(flatten)]
    pub group: GroupArgs,
}

#[derive(Debug, Args)]
pub struct OrbitsArgs {
    #[arg(long)]
    pub faces: PathBuf,
    #[arg(long)]
    pub from: PathBuf,
    #[arg(long)]
    pub to: PathBuf,
    #[arg(long)]
    pub degree: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io {
            path: p.display().to_string(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parsed<T>(path: &Path, r: std::result::Result<T, ParseError>) -> Result<T> {
    r.map_err(|source| CliError::Parse {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_document(path: &Path) -> Result<InputDocument> {
    parsed(path, InputDocument::parse(&read(path)?))
}

/// Maps a cdd row to cone coordinates: the marker moves to the end, or is
/// dropped when the whole document is conic.
fn to_cone_vector(row: &[Rational], homogenized: bool) -> Vec<Rational> {
    let mut v = row[1..].to_vec();
    if homogenized {
        v.push(row[0].clone());
    }
    v
}

/// A document turned into a pointed full-dimensional cone.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub kind: Representation,
    /// Number of input rows.
    pub inputs: usize,
    pub homogenized: bool,
    /// Input rows in cone coordinates. An H-representation of a polyhedron
    /// gets one extra row for the inequality `1 >= 0`.
    pub cone: Cone,
    pub reduced: Cone,
    /// Reduced generator index to row of `cone`.
    pub kept: Vec<usize>,
}

impl Prepared {
    pub fn new(doc: &InputDocument) -> Result<Self> {
        if doc.rows.is_empty() {
            return Err(symcone::Error::EmptyInput.into());
        }
        let homogenized = doc.rows.iter().any(|r| !r[0].is_zero());
        let mut rows: Vec<Vec<Rational>> = doc
            .rows
            .iter()
            .map(|r| to_cone_vector(r, homogenized))
            .collect();
        let dim = rows[0].len();
        if doc.kind == Representation::H && homogenized {
            let mut far = vec![Rational::zero(); dim];
            far[dim - 1] = Rational::from_integer(1.into());
            rows.push(far);
        }
        let cone = Cone::new(RationalMatrix::from_rows(dim, rows))?;
        let reduced = reduce_to_pointed_fulldim(&cone)?;
        let kept = reduced
            .provenance()
            .reduction
            .as_ref()
            .map_or_else(|| (0..cone.num_rays()).collect(), |r| r.kept.clone());
        Ok(Self {
            kind: doc.kind,
            inputs: doc.rows.len(),
            homogenized,
            cone,
            reduced,
            kept,
        })
    }

    /// True when reduced generator `i` is input row `i` for every row.
    pub fn keeps_rows(&self) -> bool {
        self.kept.len() == self.inputs && self.kept.iter().enumerate().all(|(i, &k)| i == k)
    }

    fn has_far_row(&self) -> bool {
        self.cone.num_rays() > self.inputs
    }

    /// A group on input rows, acting on reduced generators.
    pub fn reduced_group(&self, g: &PermGroup) -> Result<PermGroup> {
        if g.degree() != self.inputs {
            return Err(CliError::Usage(format!(
                "group has degree {} but the input has {} rows",
                g.degree(),
                self.inputs
            )));
        }
        let g = if self.has_far_row() {
            let gens = g
                .generators()
                .iter()
                .map(|p| {
                    let mut images = p.images();
                    images.push(self.inputs);
                    Permutation::from_images(images)
                })
                .collect::<symcone::Result<Vec<_>>>()?;
            PermGroup::new(self.inputs + 1, gens)?
        } else {
            g.clone()
        };
        Ok(g.induced_on(&self.kept)?)
    }

    /// The restricted automorphism group of the reduced generators. The
    /// extra row of an H-representation is kept fixed.
    pub fn detected_group(&self) -> Result<PermGroup> {
        let g = restricted_automorphism_group(self.reduced.rays())?.group;
        match self.kept.iter().position(|&k| k == self.inputs) {
            Some(far) => Ok(g.set_stabilizer(&FaceSet::new(vec![far]))),
            None => Ok(g),
        }
    }

    /// A group on reduced generators renumbered to input rows; dropped rows
    /// are fixed.
    pub fn input_group(&self, g: &PermGroup) -> Result<PermGroup> {
        let mut gens = Vec::new();
        for p in g.generators() {
            let mut images: Vec<usize> = (0..self.inputs).collect();
            for (i, &k) in self.kept.iter().enumerate() {
                if k < self.inputs {
                    images[k] = self.kept[p.apply(i)];
                }
            }
            let q = Permutation::from_images(images)?;
            if !q.is_identity() {
                gens.push(q);
            }
        }
        Ok(PermGroup::new(self.inputs, gens)?)
    }

    pub fn reduced_index(&self, row: usize) -> Option<usize> {
        self.kept.iter().position(|&k| k == row)
    }

    /// A reduced-space normal pulled back to cone coordinates.
    pub fn lift(&self, f: &Facet) -> Vec<BigInt> {
        match &self.reduced.provenance().reduction {
            Some(r) => r.lift_normal(&f.normal),
            None => f.normal.clone(),
        }
    }

    /// Input rows on which a cone-space normal vanishes.
    pub fn input_support(&self, normal: &[BigInt]) -> FaceSet {
        FaceSet::from_sorted(
            self.cone
                .support_of(normal)
                .iter()
                .filter(|&i| i < self.inputs)
                .collect(),
        )
    }

    /// A cone-space normal as a row of the dual representation.
    pub fn output_row(&self, normal: &[BigInt]) -> Vec<Rational> {
        let q: Vec<Rational> = normal
            .iter()
            .map(|x| Rational::from_integer(x.clone()))
            .collect();
        if !self.homogenized {
            let mut row = vec![Rational::zero()];
            row.extend(q);
            return row;
        }
        let (last, head) = q.split_last().expect("nonempty normal");
        match self.kind {
            Representation::V => {
                let mut row = vec![last.clone()];
                row.extend(head.iter().cloned());
                row
            }
            Representation::H if last.is_zero() => {
                let mut row = vec![Rational::zero()];
                row.extend(head.iter().cloned());
                row
            }
            Representation::H => {
                let mut row = vec![Rational::from_integer(1.into())];
                row.extend(head.iter().map(|x| x / last));
                row
            }
        }
    }
}

/// The task group: an explicit file, the document's own section, detection,
/// or the trivial group. The flag reports whether the group was verified.
fn choose_group(p: &Prepared, doc: &InputDocument, args: &GroupArgs) -> Result<(PermGroup, bool)> {
    let given = match &args.group {
        Some(path) => Some(parsed(path, parse_group_file(&read(path)?, p.inputs))?),
        None => match &doc.group {
            Some(gens) => Some(PermGroup::new(p.inputs, gens.clone())?),
            None => None,
        },
    };
    match given {
        Some(g) => {
            let g = p.reduced_group(&g)?;
            if args.trust_group {
                return Ok((g, false));
            }
            let t = ConversionTask::new(p.reduced.clone(), g.clone(), Method::Direct);
            t.verify_group()?;
            Ok((g, true))
        }
        None if args.detect_group => Ok((p.detected_group()?, true)),
        None => Ok((PermGroup::trivial(p.reduced.num_rays()), true)),
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Facets(a) => facets(&a),
        Command::Automorphisms(a) => automorphisms(&a),
        Command::Check(a) => check(&a),
        Command::Orbits(a) => orbits(&a),
    }
}

fn facets(a: &FacetsArgs) -> Result<()> {
    let doc = read_document(&a.input)?;
    let p = Prepared::new(&doc)?;
    let (group, restricted) = choose_group(&p, &doc, &a.group)?;
    let method = match (a.method, doc.option("method")) {
        (Some(m), _) => m.into(),
        (None, Some(name)) => name.parse()?,
        (None, None) => Method::Adjacency,
    };

    let mut policy = Policy::default();
    if let Some(n) = a.recursion_base {
        policy.base_threshold = n;
    }
    if let Some(k) = a.max_depth {
        policy.max_depth = k;
    }
    policy.balinski = !a.no_balinski;
    policy.pivot_pruning = !a.no_pruning;
    policy.threads = a.threads.max(1);
    if let Some(path) = &a.perturb {
        if !p.keeps_rows() {
            return Err(CliError::Usage(
                "a perturbation needs every input row to be a generator of the reduced cone".into(),
            ));
        }
        policy.perturbation = Some(parsed(
            path,
            parse_perturbation_file(&read(path)?, p.inputs),
        )?);
    }
    if let Some(order) = &a.lift_order {
        let mapped = order
            .iter()
            .map(|&r| {
                r.checked_sub(1)
                    .and_then(|r| p.reduced_index(r))
                    .ok_or_else(|| {
                        CliError::Usage(format!("row {r} is not a generator of the reduced cone"))
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        policy.cascade_order = Some(mapped);
    }
    let bank = match &a.bank {
        Some(path) if path.exists() => Some(Arc::new(Bank::import(&read(path)?)?)),
        Some(_) => Some(Arc::new(Bank::new())),
        None => None,
    };
    policy.bank = bank.clone();

    let mut task =
        ConversionTask::new(p.reduced.clone(), group.clone(), method).with_policy(policy);
    task.restricted = restricted;
    let result = convert(&task)?;

    if let (Some(path), Some(bank)) = (&a.bank, &bank) {
        write(Some(path), &bank.export())?;
    }

    let normals: Vec<Vec<BigInt>> = result.representatives.iter().map(|f| p.lift(f)).collect();
    let out = InputDocument::new(
        p.kind.dual(),
        normals.iter().map(|n| p.output_row(n)).collect(),
    );
    write(a.out.as_deref(), &out.render())?;

    let mut report = String::new();
    let _ = writeln!(report, "{FORMAT_HEADER}");
    let _ = writeln!(report, "input {}", p.kind.header());
    let _ = writeln!(report, "method {method}");
    let _ = writeln!(report, "rows {}", p.inputs);
    let _ = writeln!(report, "generators {}", p.reduced.num_rays());
    let _ = writeln!(report, "dimension {}", p.reduced.dim());
    let _ = writeln!(report, "group_order {}", group.order());
    let _ = writeln!(report, "orbits {}", result.representatives.len());
    let _ = writeln!(
        report,
        "total {}",
        total_facets(&group, &result.representatives)
    );
    if let Some(b) = result.basis_orbits {
        let _ = writeln!(report, "basis_orbits {b}");
    }
    for (i, (f, n)) in result.representatives.iter().zip(&normals).enumerate() {
        let _ = writeln!(
            report,
            "orbit {} size {} stabilizer {} rows {{{}}}",
            i + 1,
            group.orbit_size(&f.support),
            group.set_stabilizer(&f.support).order(),
            p.input_support(n).to_one_based_string()
        );
    }
    match (&a.report, &a.out) {
        (Some(path), _) => write(Some(path), &report),
        (None, Some(out)) => write(
            Some(&PathBuf::from(format!("{}.orbits", out.display()))),
            &report,
        ),
        (None, None) => {
            eprint!("{report}");
            Ok(())
        }
    }
}

fn automorphisms(a: &AutomorphismsArgs) -> Result<()> {
    let p = Prepared::new(&read_document(&a.input)?)?;
    let g = p.input_group(&p.detected_group()?)?;
    let mut text = render_group_file(&g);
    let dropped: Vec<String> = (0..p.inputs)
        .filter(|&r| p.reduced_index(r).is_none())
        .map(|r| (r + 1).to_string())
        .collect();
    if !dropped.is_empty() {
        text.insert_str(
            FORMAT_HEADER.len() + 1,
            &format!(
                "# rows {} are not generators and are held fixed\n",
                dropped.join(" ")
            ),
        );
    }
    write(a.out.as_deref(), &text)
}

fn row_name(p: &Prepared, i: usize) -> String {
    if i < p.inputs {
        format!("row {}", i + 1)
    } else {
        "the implicit inequality 1 >= 0".to_string()
    }
}

fn render_row(row: &[Rational]) -> String {
    row.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

fn check(a: &CheckArgs) -> Result<()> {
    let doc = read_document(&a.input)?;
    let p = Prepared::new(&doc)?;
    let claimed = read_document(&a.facets)?;
    if claimed.kind != p.kind.dual() {
        return Err(CliError::Usage(format!(
            "claimed list must be a {}",
            p.kind.dual().header()
        )));
    }
    if claimed.cols() != doc.cols() {
        return Err(CliError::Usage(format!(
            "claimed rows have {} columns, input rows have {}",
            claimed.cols(),
            doc.cols()
        )));
    }
    let (group, _) = choose_group(&p, &doc, &a.group)?;

    let mut reps = BTreeSet::new();
    let mut facets = Vec::new();
    for (j, row) in claimed.rows.iter().enumerate() {
        if !p.homogenized && !row[0].is_zero() {
            return Err(CliError::Check(format!(
                "claimed row {} has a nonzero first entry but the input is a cone",
                j + 1
            )));
        }
        let normal = primitive_integer(&to_cone_vector(row, p.homogenized));
        if let Some(i) = (0..p.cone.num_rays()).find(|&i| p.cone.value(&normal, i).is_negative()) {
            return Err(CliError::Check(format!(
                "claimed row {} ({}) is violated by {}",
                j + 1,
                render_row(row),
                row_name(&p, i)
            )));
        }
        let support = p.cone.support_of(&normal);
        let local = FaceSet::new(support.iter().filter_map(|i| p.reduced_index(i)).collect());
        let Some(f) = facet_through(&p.reduced, &local) else {
            return Err(CliError::Check(format!(
                "claimed row {} ({}) does not define a facet",
                j + 1,
                render_row(row)
            )));
        };
        if reps.insert(group.canonical_representative(&f.support)) {
            facets.push(f);
        }
    }
    if facets.is_empty() {
        return Err(CliError::Check("no facets claimed".into()));
    }
    for f in &facets {
        for ridge in ridges_of(&p.reduced, f)? {
            let next = gift_wrap(&p.reduced, f, &ridge)?;
            if !reps.contains(&group.canonical_representative(&next.support)) {
                let n = p.lift(&next);
                let rows: Vec<String> = p
                    .input_support(&n)
                    .iter()
                    .map(|i| (i + 1).to_string())
                    .collect();
                return Err(CliError::Check(format!(
                    "missing facet {} through rows {}",
                    render_row(&p.output_row(&n)),
                    rows.join(" ")
                )));
            }
        }
    }
    println!(
        "ok: {} orbits, {} facets",
        facets.len(),
        total_facets(&group, &facets)
    );
    Ok(())
}

fn orbits(a: &OrbitsArgs) -> Result<()> {
    let faces = parsed(&a.faces, parse_face_list(&read(&a.faces)?, a.degree))?;
    let g1 = parsed(&a.from, parse_group_file(&read(&a.from)?, a.degree))?;
    let g2 = parsed(&a.to, parse_group_file(&read(&a.to)?, a.degree))?;
    let out = if g1.is_subgroup_of(&g2) {
        fuse(&faces, &g1, &g2)?.sorted_representatives()
    } else if g2.is_subgroup_of(&g1) {
        let mut reps = split(&faces, &g1, &g2)?;
        reps.sort();
        reps
    } else {
        return Err(CliError::Usage("neither group contains the other".into()));
    };
    write(a.out.as_deref(), &render_face_list(&out))
}

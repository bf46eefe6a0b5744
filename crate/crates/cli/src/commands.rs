use std::fs;
use std::path::Path;

use phylo_core::{
    cophenetic_of, detect_convention, hom_exists, interleaving_distance, is_interleaved,
    lp_distance, parse_newick, phtree_distance_closed_form, serialize, to_phylo,
    CopheneticError, CopheneticVector, FlowError, NewickError, Norm, PhTreePoset, PhyloTree,
};
use rayon::prelude::*;

use crate::output::{num, MatrixReport};
use crate::{CliError, Convention, MatrixFormat, Pair};

pub struct Context {
    pub convention: Convention,
    pub digits: u32,
}

impl From<CopheneticError> for CliError {
    fn from(e: CopheneticError) -> Self {
        CliError::Structure(e.to_string())
    }
}

impl From<FlowError> for CliError {
    fn from(e: FlowError) -> Self {
        CliError::Usage(e.to_string())
    }
}

fn newick_error(path: &Path, tree: Option<usize>, e: NewickError) -> CliError {
    let at = match tree {
        Some(i) => format!("{}: tree {i}: {e}", path.display()),
        None => format!("{}: {e}", path.display()),
    };
    if e.is_syntax() {
        CliError::Syntax(at)
    } else {
        CliError::Structure(at)
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn write_out(out: Option<&Path>, text: String) -> Result<String, CliError> {
    match out {
        Some(p) => {
            fs::write(p, text).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

impl Context {
    fn convert(&self, node: &phylo_core::NewickNode) -> Result<PhyloTree, NewickError> {
        let conv = self.convention.fixed().unwrap_or_else(|| detect_convention(node));
        to_phylo(node, conv)
    }

    /// Every tree in `path`, or the first error.
    fn load_all(&self, path: &Path) -> Result<Vec<PhyloTree>, CliError> {
        let text = read(path)?;
        let nodes = parse_newick(&text).map_err(|e| newick_error(path, None, e))?;
        nodes
            .iter()
            .enumerate()
            .map(|(i, n)| self.convert(n).map_err(|e| newick_error(path, Some(i), e)))
            .collect()
    }

    fn load_one(&self, path: &Path, index: usize) -> Result<PhyloTree, CliError> {
        let text = read(path)?;
        let nodes = parse_newick(&text).map_err(|e| newick_error(path, None, e))?;
        let node = nodes.get(index).ok_or_else(|| {
            CliError::Usage(format!(
                "{}: tree index {index} out of range ({} trees)",
                path.display(),
                nodes.len()
            ))
        })?;
        self.convert(node).map_err(|e| newick_error(path, Some(index), e))
    }

    fn load_pair(&self, pair: &Pair) -> Result<(PhyloTree, PhyloTree), CliError> {
        Ok((
            self.load_one(&pair.a, pair.index_a)?,
            self.load_one(&pair.b, pair.index_b)?,
        ))
    }
}

pub fn validate(ctx: &Context, path: &Path) -> Result<String, CliError> {
    let text = read(path)?;
    let nodes = parse_newick(&text).map_err(|e| newick_error(path, None, e))?;
    let mut counts = Vec::with_capacity(nodes.len());
    let mut problems = Vec::new();
    for (i, node) in nodes.iter().enumerate() {
        match ctx.convert(node) {
            Ok(t) => counts.push(t.n().to_string()),
            Err(e) => problems.push(format!("{}: tree {i}: {e}", path.display())),
        }
    }
    if !problems.is_empty() {
        return Err(CliError::Structure(problems.join("\n")));
    }
    let noun = if nodes.len() == 1 { "tree" } else { "trees" };
    Ok(format!("{} {noun}, leaf counts: {}\n", nodes.len(), counts.join(", ")))
}

pub fn dist(ctx: &Context, pair: &Pair, p: Norm, oracle: bool, tol: f64) -> Result<String, CliError> {
    if oracle && p != Norm::LInf {
        return Err(CliError::Usage("--oracle compares the l-infinity distance; use --p inf".into()));
    }
    let (a, b) = ctx.load_pair(pair)?;
    let (ca, cb) = (cophenetic_of(&a), cophenetic_of(&b));
    let closed = lp_distance(&ca, &cb, p)?;
    if !oracle {
        return Ok(format!("{}\n", num(closed, ctx.digits)));
    }
    let engine = interleaving_distance(&PhTreePoset, &a, &b, tol, closed + 1.0)?;
    let diff = (engine - closed).abs();
    let report = format!(
        "closed_form: {}\ninterleaving: {}\ndifference: {}\n",
        num(closed, ctx.digits),
        num(engine, ctx.digits),
        num(diff, ctx.digits)
    );
    if diff > tol {
        return Err(CliError::Disagreement {
            report,
            message: format!("closed form and interleaving oracle differ by {diff} > {tol}"),
        });
    }
    Ok(report)
}

fn check_labels(trees: &[PhyloTree]) -> Result<(), CliError> {
    if let Some(first) = trees.first() {
        for (i, t) in trees.iter().enumerate().skip(1) {
            if t.names() != first.names() {
                return Err(CliError::Structure(format!(
                    "tree {i}: leaf labels differ from tree 0 ({} vs {} leaves)",
                    t.n(),
                    first.n()
                )));
            }
        }
    }
    Ok(())
}

pub fn matrix(
    ctx: &Context,
    path: &Path,
    p: Norm,
    out: Option<&Path>,
    format: MatrixFormat,
) -> Result<String, CliError> {
    let trees = ctx.load_all(path)?;
    check_labels(&trees)?;
    let vectors: Vec<CopheneticVector> = trees.par_iter().map(cophenetic_of).collect();
    let k = vectors.len();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
    let dists: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| lp_distance(&vectors[i], &vectors[j], p))
        .collect::<Result<_, _>>()?;
    let mut values = vec![vec![0.0; k]; k];
    for (&(i, j), &d) in pairs.iter().zip(&dists) {
        values[i][j] = d;
        values[j][i] = d;
    }
    let report = MatrixReport {
        labels: (0..k).map(|i| format!("{}:{i}", path.display())).collect(),
        values,
        metric: p.to_string(),
    };
    let text = match format {
        MatrixFormat::Csv => report.to_csv(ctx.digits),
        MatrixFormat::Json => report.to_json(ctx.digits),
    };
    write_out(out, text)
}

pub fn smooth(ctx: &Context, path: &Path, eps: f64, out: Option<&Path>) -> Result<String, CliError> {
    let trees = ctx.load_all(path)?;
    let mut text = String::new();
    for t in &trees {
        text.push_str(&serialize(&phylo_core::smooth(t, eps)?));
        text.push('\n');
    }
    write_out(out, text)
}

pub fn vector(ctx: &Context, path: &Path, index: usize, format: MatrixFormat) -> Result<String, CliError> {
    let v = cophenetic_of(&ctx.load_one(path, index)?);
    Ok(match format {
        MatrixFormat::Json => {
            let mut s = serde_json::to_string(&v.to_json()).expect("vector serializes");
            s.push('\n');
            s
        }
        MatrixFormat::Csv => v.to_csv(),
    })
}

pub fn hom(ctx: &Context, pair: &Pair) -> Result<String, CliError> {
    let (a, b) = ctx.load_pair(pair)?;
    let (ca, cb) = (cophenetic_of(&a), cophenetic_of(&b));
    let verdict = match (hom_exists(&ca, &cb)?, hom_exists(&cb, &ca)?) {
        (true, true) => "both (equal)",
        (true, false) => "A→B",
        (false, true) => "B→A",
        (false, false) => "incomparable",
    };
    Ok(format!("{verdict}\n"))
}

pub fn interleave(ctx: &Context, pair: &Pair, tol: f64) -> Result<String, CliError> {
    let (a, b) = ctx.load_pair(pair)?;
    let ceiling = phtree_distance_closed_form(&a, &b)? + 1.0;
    let eps = interleaving_distance(&PhTreePoset, &a, &b, tol, ceiling)?;
    let cert = is_interleaved(&PhTreePoset, &a, &b, eps)
        .expect("the bisection result always admits an interleaving");
    let mut s = serde_json::to_string_pretty(&cert).expect("certificate serializes");
    s.push('\n');
    Ok(s)
}

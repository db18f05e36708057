use std::collections::BTreeMap;

use super::{AnalysisKind, NetworkDocument};
use crate::error::{Error, Result};
use crate::slh::{cascade, SlhModel};
use crate::uncertainty::UncertaintyBox;

#[derive(Debug, Clone, PartialEq)]
pub struct BoundUncertainty {
    pub name: String,
    pub ubox: UncertaintyBox,
    /// Parameter values in box order; upper bounds where `at` is silent.
    pub values: Vec<f64>,
}

/// An analysis request with its target model and parameters filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct Task {
    pub kind: AnalysisKind,
    pub target: String,
    pub model: SlhModel,
    pub uncertainty: Option<BoundUncertainty>,
    pub grid: usize,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedModels {
    /// Components and folded chains by name.
    pub models: BTreeMap<String, SlhModel>,
    pub tasks: Vec<Task>,
}

/// Folds every chain right to left with the cascade product and binds each
/// analysis to its model. Every resulting model is checked at `tol`.
pub fn resolve_document(doc: &NetworkDocument, tol: f64) -> Result<ResolvedModels> {
    let mut models = doc.components.clone();
    for (name, members) in &doc.chains {
        let lookup = |m: &str| {
            doc.components
                .get(m)
                .ok_or_else(|| Error::InvalidComposition(format!("chain `{name}` references unknown component `{m}`")))
        };
        let (last, rest) = members
            .split_last()
            .ok_or_else(|| Error::InvalidComposition(format!("chain `{name}` is empty")))?;
        let mut acc = lookup(last)?.clone();
        let mut upstream = last.as_str();
        for m in rest.iter().rev() {
            let g = lookup(m)?;
            acc = cascade(g, &acc).map_err(|e| {
                Error::InvalidComposition(format!("chain `{name}`: cannot cascade `{m}` after `{upstream}`: {e}"))
            })?;
            upstream = m;
        }
        models.insert(name.clone(), acc);
    }
    for g in models.values() {
        g.ensure_valid(tol)?;
    }
    let mut tasks = Vec::with_capacity(doc.analyses.len());
    for a in &doc.analyses {
        let model = models
            .get(&a.target)
            .ok_or_else(|| Error::InvalidComposition(format!("unknown analysis target `{}`", a.target)))?
            .clone();
        let uncertainty = match &a.uncertainty {
            None => None,
            Some(u) => {
                let decl = doc
                    .uncertainties
                    .get(u)
                    .ok_or_else(|| Error::InvalidComposition(format!("unknown uncertainty `{u}`")))?;
                Some(BoundUncertainty {
                    name: u.clone(),
                    values: decl.ubox.assignment(&a.at)?,
                    ubox: decl.ubox.clone(),
                })
            }
        };
        tasks.push(Task {
            kind: a.kind,
            target: a.target.clone(),
            model,
            uncertainty,
            grid: a.grid,
            margin: a.margin,
        });
    }
    Ok(ResolvedModels { models, tasks })
}

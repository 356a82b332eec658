//! The fusion bound and the tree-width bound of rigid SIDs.

use alloc::vec::Vec;

use super::cfg::{parikh_image, sid_to_cfg};
use super::rigid::check_rigid;
use super::{regular, AnalysisError, RuleForm};
use crate::slr::{equality_eliminate, Sid};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundsReport {
    /// Fusion bound: `max_base * max_size`.
    pub b: usize,
    /// Tree-width bound of canonical models.
    pub k: usize,
    pub tw_bound: usize,
    /// Parikh bases, one per linear set.
    pub bases: Vec<Vec<usize>>,
    pub max_base: usize,
    /// Existentials of each rule's qpf body, by rule.
    pub sizes: Vec<usize>,
    pub max_size: usize,
    /// The SID the bounds refer to, after equality elimination.
    pub sid: Sid,
}

fn sizes(sid: &Sid) -> Vec<usize> {
    sid.rules()
        .iter()
        .map(|r| r.flat().qpf_existentials().len())
        .collect()
}

fn bounds_of(
    sid: &Sid,
    pred: &str,
) -> Result<(usize, Vec<Vec<usize>>, usize, Vec<usize>), AnalysisError> {
    let report = check_rigid(sid, pred)?;
    if !report.rigid {
        return Err(AnalysisError::NotRigid(report.violations));
    }
    let image = parikh_image(&sid_to_cfg(sid, pred)?)?;
    let bases = image.sets.iter().map(|l| l.base.clone()).collect();
    let sizes = sizes(sid);
    let max_size = sizes.iter().copied().max().unwrap_or(0);
    Ok((image.max_base_norm(), bases, max_size, sizes))
}

/// `B = max_j |b_j| · max_ρ size(ρ)` for an equality-free SID rigid for
/// `pred`, where `size(ρ)` counts the existentials of `ρ`'s qpf body.
pub fn fusion_bound_b(sid: &Sid, pred: &str) -> Result<usize, AnalysisError> {
    let (max_base, _, max_size, _) = bounds_of(sid, pred)?;
    Ok(max_base * max_size)
}

/// `K + B`, where `K` is one less than the most variables of a productive
/// rule. Equalities are eliminated first.
pub fn treewidth_bound(sid: &Sid, pred: &str) -> Result<BoundsReport, AnalysisError> {
    let sid = equality_eliminate(sid);
    let reg = regular(&sid)?;
    let (max_base, bases, max_size, sizes) = bounds_of(&sid, pred)?;
    let k = sid
        .rules()
        .iter()
        .zip(&reg.forms)
        .filter(|(_, f)| matches!(f, RuleForm::Atom | RuleForm::Productive))
        .map(|(r, _)| (r.params.len() + r.flat().existentials.len()).saturating_sub(1))
        .max()
        .unwrap_or(0);
    let b = max_base * max_size;
    Ok(BoundsReport {
        b,
        k,
        tw_bound: k + b,
        bases,
        max_base,
        sizes,
        max_size,
        sid,
    })
}

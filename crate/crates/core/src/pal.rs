//! Truthful public announcements as theory restriction.

use crate::boolfn::{Engine, Func};
use crate::eval::truth_set_fn;
use crate::kstruct::KnowledgeStructure;
use crate::lang::Formula;
use crate::Error;

/// `F|phi`: same vocabulary and observables, theory strengthened by the
/// truth set of the announced formula.
#[derive(Debug, Clone)]
pub struct Restriction<E: Engine> {
    pub announced: Func,
    pub result: KnowledgeStructure<E>,
    /// No state of the base structure satisfies the announcement.
    pub vacuous: bool,
}

pub fn restrict<E: Engine>(ks: &KnowledgeStructure<E>, phi: &Formula) -> Result<Restriction<E>, Error> {
    let announced = truth_set_fn(ks, phi)?;
    Ok(restrict_by(ks, announced))
}

pub(crate) fn restrict_by<E: Engine>(ks: &KnowledgeStructure<E>, announced: Func) -> Restriction<E> {
    let e = ks.engine();
    let theta = e.and(ks.theta(), announced);
    Restriction { announced, result: ks.with_theta(theta), vacuous: !e.is_sat(theta) }
}

/// Truth set of `[phi] psi`: `~[phi] | [psi]` evaluated in `F|phi`.
pub fn announce_set<E: Engine>(ks: &KnowledgeStructure<E>, phi: &Formula, psi: &Formula) -> Result<Func, Error> {
    let r = restrict(ks, phi)?;
    let e = ks.engine();
    if r.vacuous {
        return Ok(e.tt());
    }
    let after = truth_set_fn(&r.result, psi)?;
    Ok(e.or(e.not(r.announced), after))
}

/// Outcome of a sequence of announcements.
#[derive(Debug, Clone)]
pub struct AnnouncementRun<E: Engine> {
    pub result: KnowledgeStructure<E>,
    /// Theory after each announcement, in order.
    pub thetas: Vec<Func>,
}

/// Folds `restrict` over the list, left to right.
pub fn announce_iterate<E: Engine>(
    ks: &KnowledgeStructure<E>,
    announcements: &[Formula],
) -> Result<AnnouncementRun<E>, Error> {
    if announcements.is_empty() {
        return Err(Error::InvalidArgument("announcement list must not be empty".into()));
    }
    let mut current = ks.clone();
    let mut thetas = Vec::with_capacity(announcements.len());
    for (index, phi) in announcements.iter().enumerate() {
        let r = restrict(&current, phi)?;
        if r.vacuous {
            return Err(Error::VacuousAnnouncement { index });
        }
        thetas.push(r.result.theta());
        current = r.result;
    }
    Ok(AnnouncementRun { result: current, thetas })
}

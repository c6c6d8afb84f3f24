//! Greedy clustering of curve parameters by the weak-star geometry of
//! their tracked measures.
//!
//! Each sampled parameter carries one dictionary-coordinate vector per
//! tracked measure (orbit average, neutral part, ...). Two parameters are
//! close when every tracked pair is close; the greedy pass assigns each
//! parameter to the first established center within delta/2 and otherwise
//! founds a new cell. The most populous cell is the working subfamily: by
//! pigeonhole it holds at least a 1/num_cells fraction of everything, so a
//! small cover certifies that many parameters share one measure profile.

use crate::error::{LabError, Result};
use crate::measure::dictionary::{DictionaryCoordinates, TestDictionary};
use crate::orbit::ParameterSet;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClusterResult {
    pub delta: f64,
    pub num_cells: usize,
    /// Member indices per cell, in founding order.
    pub cells: Vec<Vec<usize>>,
    /// Founding member index of each cell.
    pub centers: Vec<usize>,
    /// Index (into `cells`) of the most populous cell; first wins ties.
    pub selected_cell: usize,
    /// The selected cell as a parameter set (same interval width).
    pub selected: ParameterSet,
    /// Pigeonhole sanity: selected size * num_cells >= total members.
    pub pigeonhole_ok: bool,
}

/// Cover the parameter set by weak-star balls of radius delta/2 around
/// greedily chosen members, and return the heaviest cell.
///
/// `coords[i]` lists the tracked-measure coordinates of `params.members[i]`;
/// all members must track the same number of measures, at least one.
pub fn cluster_parameters(
    params: &ParameterSet,
    coords: &[Vec<DictionaryCoordinates>],
    dict: &TestDictionary,
    delta: f64,
) -> Result<ClusterResult> {
    if params.is_empty() {
        return Err(LabError::Config("cannot cluster an empty parameter set".into()));
    }
    if coords.len() != params.count() {
        return Err(LabError::Config(format!(
            "{} members but {} coordinate rows",
            params.count(),
            coords.len()
        )));
    }
    let tracked = coords[0].len();
    if tracked == 0 || coords.iter().any(|c| c.len() != tracked) {
        return Err(LabError::Config(
            "every member must track the same nonzero number of measures".into(),
        ));
    }
    if !(delta > 0.0) {
        return Err(LabError::Config("cluster radius must be positive".into()));
    }

    let distance = |i: usize, j: usize| -> Result<f64> {
        let mut worst = 0.0f64;
        for k in 0..tracked {
            worst = worst.max(dict.distance(&coords[i][k], &coords[j][k])?);
        }
        Ok(worst)
    };

    let mut centers: Vec<usize> = Vec::new();
    let mut cells: Vec<Vec<usize>> = Vec::new();
    'members: for i in 0..params.count() {
        for (c, &center) in centers.iter().enumerate() {
            if distance(i, center)? <= delta / 2.0 {
                cells[c].push(i);
                continue 'members;
            }
        }
        centers.push(i);
        cells.push(vec![i]);
    }

    let selected_cell = cells
        .iter()
        .enumerate()
        .max_by(|(ia, a), (ib, b)| a.len().cmp(&b.len()).then(ib.cmp(ia)))
        .map(|(i, _)| i)
        .unwrap();
    let selected = ParameterSet::from_members(
        cells[selected_cell].iter().map(|&i| params.members[i]).collect(),
        params.delta_s,
    );
    let pigeonhole_ok = cells[selected_cell].len() * cells.len() >= params.count();
    Ok(ClusterResult {
        delta,
        num_cells: cells.len(),
        cells,
        centers,
        selected_cell,
        selected,
        pigeonhole_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::ProjectivePoint;
    use crate::measure::{Atom, EmpiricalMeasure};

    fn coords_at(dict: &TestDictionary, u: f64) -> Vec<DictionaryCoordinates> {
        let mu = EmpiricalMeasure {
            atoms: vec![Atom { xi: ProjectivePoint::new(u, 0.3, 0.4), weight: 1.0 }],
        };
        vec![dict.coordinates(&mu)]
    }

    #[test]
    fn two_blobs_make_two_cells() {
        let dict = TestDictionary::new();
        // Seven members: four huddled near u = 0.1, three near u = 0.6.
        let us = [0.10, 0.1001, 0.0999, 0.10005, 0.60, 0.6001, 0.5999];
        let params = ParameterSet {
            members: us.to_vec(),
            delta_s: 1.0 / 128.0,
        };
        let coords: Vec<_> = us.iter().map(|&u| coords_at(&dict, u)).collect();
        let result = cluster_parameters(&params, &coords, &dict, 0.05).unwrap();
        assert_eq!(result.num_cells, 2);
        assert_eq!(result.cells[0].len(), 4);
        assert_eq!(result.cells[1].len(), 3);
        assert_eq!(result.selected_cell, 0);
        assert_eq!(result.selected.count(), 4);
        assert!(result.pigeonhole_ok);
    }

    #[test]
    fn tight_family_is_one_cell() {
        let dict = TestDictionary::new();
        let us: Vec<f64> = (0..10).map(|i| 0.4 + 1e-7 * i as f64).collect();
        let params = ParameterSet { members: us.clone(), delta_s: 1.0 / 64.0 };
        let coords: Vec<_> = us.iter().map(|&u| coords_at(&dict, u)).collect();
        let result = cluster_parameters(&params, &coords, &dict, 0.01).unwrap();
        assert_eq!(result.num_cells, 1);
        assert_eq!(result.selected.count(), 10);
    }

    #[test]
    fn input_shapes_are_validated() {
        let dict = TestDictionary::new();
        let params = ParameterSet { members: vec![0.1, 0.2], delta_s: 0.01 };
        let empty = ParameterSet { members: vec![], delta_s: 0.01 };
        assert!(cluster_parameters(&empty, &[], &dict, 0.1).is_err());
        let coords = vec![coords_at(&dict, 0.1)];
        assert!(cluster_parameters(&params, &coords, &dict, 0.1).is_err());
        let uneven = vec![coords_at(&dict, 0.1), vec![]];
        assert!(cluster_parameters(&params, &uneven, &dict, 0.1).is_err());
    }

    #[test]
    fn greedy_assignment_is_deterministic() {
        let dict = TestDictionary::new();
        let us: Vec<f64> = (0..12).map(|i| (i as f64 * 0.083) % 1.0).collect();
        let params = ParameterSet { members: us.clone(), delta_s: 0.01 };
        let coords: Vec<_> = us.iter().map(|&u| coords_at(&dict, u)).collect();
        let a = cluster_parameters(&params, &coords, &dict, 0.2).unwrap();
        let b = cluster_parameters(&params, &coords, &dict, 0.2).unwrap();
        assert_eq!(a.centers, b.centers);
        assert_eq!(a.cells, b.cells);
        assert_eq!(a.selected_cell, b.selected_cell);
    }
}

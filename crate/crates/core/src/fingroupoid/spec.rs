//! JSON input forms for groupoids and subgroupoids.
//!
//! ```json
//! {"objects": 1, "arrows": [{"id":0,"src":0,"tgt":0}], "identity": [0], "inverse": [0], "compose": [[0,0,0]]}
//! {"pair": 3}
//! {"group": {"table": [[0,1],[1,0]]}}
//! {"group": {"cyclic": 3}}
//! {"action": {"group": {"symmetric": 3}, "points": 3, "act": [[...], ...]}}
//! {"disjoint_union": [{"pair": 2}, {"group": {"cyclic": 2}}]}
//! ```

use serde::{Deserialize, Serialize};

use super::{cyclic_group_table, symmetric_group_table, FiniteGroupoid, GroupTable, GroupoidError, GroupoidTables, Subgroupoid};

/// A group given by its table or by name.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupSpec {
    Table { table: GroupTable },
    Cyclic { cyclic: usize },
    Symmetric { symmetric: usize },
}

impl GroupSpec {
    pub fn table(&self) -> GroupTable {
        match self {
            GroupSpec::Table { table } => table.clone(),
            GroupSpec::Cyclic { cyclic } => cyclic_group_table(*cyclic),
            GroupSpec::Symmetric { symmetric } => symmetric_group_table(*symmetric),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionSpec {
    pub group: GroupSpec,
    pub points: usize,
    /// `act[g][m] = g·m`
    pub act: Vec<Vec<usize>>,
}

/// Any of the accepted groupoid file forms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupoidSpec {
    Pair { pair: usize },
    Group { group: GroupSpec },
    Action { action: ActionSpec },
    DisjointUnion { disjoint_union: Vec<GroupoidSpec> },
    Tables(GroupoidTables),
}

impl GroupoidSpec {
    pub fn build(&self) -> Result<FiniteGroupoid, GroupoidError> {
        match self {
            GroupoidSpec::Pair { pair } => Ok(FiniteGroupoid::pair(*pair)),
            GroupoidSpec::Group { group } => FiniteGroupoid::group(&group.table()),
            GroupoidSpec::Action { action } => FiniteGroupoid::action(&action.group.table(), action.points, &action.act),
            GroupoidSpec::DisjointUnion { disjoint_union } => {
                let parts = disjoint_union.iter().map(GroupoidSpec::build).collect::<Result<Vec<_>, _>>()?;
                FiniteGroupoid::disjoint_union(&parts)
            }
            GroupoidSpec::Tables(tables) => FiniteGroupoid::from_tables(tables),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NamedSubgroupoid {
    /// Identities over all objects.
    Base,
    /// The whole groupoid.
    Full,
}

/// Subgroupoid file forms: `"base"`, `"full"`, `{"objects": [...], "arrows": [...]}`,
/// `{"identities": [...]}` or `{"generated_by": {"objects": [...], "arrows": [...]}}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SubgroupoidSpec {
    Named(NamedSubgroupoid),
    Identities { identities: Vec<usize> },
    Generated { generated_by: SubgroupoidSets },
    Explicit(SubgroupoidSets),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupoidSets {
    #[serde(default)]
    pub objects: Vec<usize>,
    #[serde(default)]
    pub arrows: Vec<usize>,
}

impl SubgroupoidSpec {
    pub fn build(&self, g: &FiniteGroupoid) -> Result<Subgroupoid, GroupoidError> {
        match self {
            SubgroupoidSpec::Named(NamedSubgroupoid::Base) => Ok(Subgroupoid::base(g)),
            SubgroupoidSpec::Named(NamedSubgroupoid::Full) => Ok(Subgroupoid::full(g)),
            SubgroupoidSpec::Identities { identities } => Subgroupoid::identities_over(g, identities.iter().copied()),
            SubgroupoidSpec::Generated { generated_by } => Subgroupoid::generated(
                g,
                generated_by.objects.iter().copied(),
                generated_by.arrows.iter().copied(),
            ),
            SubgroupoidSpec::Explicit(sets) => {
                Subgroupoid::new(g, sets.objects.iter().copied(), sets.arrows.iter().copied())
            }
        }
    }
}

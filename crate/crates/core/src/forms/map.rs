use crate::poly::{Polynomial, Rational};

/// A rational point of the source whose image avoids the target's singular locus.
#[derive(Clone, Debug, PartialEq)]
pub struct MapWitness {
    pub point: Vec<Rational>,
}

/// A polynomial map between registered varieties, written in the source's ambient coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct MapSpec {
    pub id: String,
    pub source: String,
    pub target: String,
    pub components: Vec<Polynomial>,
    pub witness: MapWitness,
    /// Set for slice inclusions such as {v = 1}.
    pub inclusion: bool,
}

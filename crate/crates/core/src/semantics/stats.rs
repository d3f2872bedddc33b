/// Work counters collected during one check.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    /// Second-order candidate sets tried (including brute-force fixpoint candidates).
    pub subsets_enumerated: u64,
    /// Fixpoint iterations, counting the final one that detects stability.
    pub fixpoint_rounds: u64,
    /// Body evaluations actually performed (memo hits excluded).
    pub body_evaluations: u64,
    /// Body evaluations answered from the memo table.
    pub memo_hits: u64,
}

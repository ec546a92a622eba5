use std::fmt;
use std::ops::Range;
use std::sync::Arc;

/// Which block a variable belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    T,
    A,
    Param,
}

/// Ordered variable names partitioned into a t-block, an a-block and formal
/// parameters.
///
/// When `a_truncated` is set, products drop every term whose total degree in
/// the a-block is two or more.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Registry {
    names: Vec<String>,
    t_block: Range<usize>,
    a_block: Range<usize>,
    params: Range<usize>,
    a_truncated: bool,
}

impl Registry {
    pub fn new<S: AsRef<str>>(t: &[S], a: &[S], params: &[S], a_truncated: bool) -> Arc<Self> {
        let mut names: Vec<String> = Vec::with_capacity(t.len() + a.len() + params.len());
        names.extend(t.iter().map(|s| s.as_ref().to_string()));
        names.extend(a.iter().map(|s| s.as_ref().to_string()));
        names.extend(params.iter().map(|s| s.as_ref().to_string()));
        let t_block = 0..t.len();
        let a_block = t.len()..t.len() + a.len();
        let params = a_block.end..names.len();
        Arc::new(Self {
            names,
            t_block,
            a_block,
            params,
            a_truncated,
        })
    }

    /// Registry with no variables at all (constant polynomials).
    pub fn constants() -> Arc<Self> {
        Self::new::<&str>(&[], &[], &[], false)
    }

    /// `x1..xd` ambient coordinates, stored in the t-block.
    pub fn ambient(dim: usize, prefix: &str) -> Arc<Self> {
        let names: Vec<String> = (1..=dim).map(|i| format!("{prefix}{i}")).collect();
        Self::new::<String>(&names, &[], &[], false)
    }

    /// `t1..tn`, `a1..ad` (a-truncated) plus named parameters.
    pub fn induction(n: usize, dim: usize, params: &[String]) -> Arc<Self> {
        let t: Vec<String> = (1..=n).map(|i| format!("t{i}")).collect();
        let a: Vec<String> = (1..=dim).map(|i| format!("a{i}")).collect();
        Self::new(&t, &a, params, true)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn t_block(&self) -> Range<usize> {
        self.t_block.clone()
    }

    pub fn a_block(&self) -> Range<usize> {
        self.a_block.clone()
    }

    pub fn param_block(&self) -> Range<usize> {
        self.params.clone()
    }

    pub fn a_truncated(&self) -> bool {
        self.a_truncated
    }

    pub fn block_of(&self, i: usize) -> Block {
        if self.t_block.contains(&i) {
            Block::T
        } else if self.a_block.contains(&i) {
            Block::A
        } else {
            Block::Param
        }
    }

    pub fn t(&self, j: usize) -> usize {
        assert!(j < self.t_block.len(), "t-variable {j} out of range");
        self.t_block.start + j
    }

    pub fn a(&self, j: usize) -> usize {
        assert!(j < self.a_block.len(), "a-variable {j} out of range");
        self.a_block.start + j
    }

    pub fn param(&self, name: &str) -> Option<usize> {
        self.params.clone().find(|&i| self.names[i] == name)
    }

    pub(crate) fn a_degree(&self, exps: &[u32]) -> u32 {
        exps[self.a_block.clone()].iter().sum()
    }

    /// Same variables without a-truncation.
    pub fn untruncated(&self) -> Arc<Self> {
        Arc::new(Self {
            a_truncated: false,
            ..self.clone()
        })
    }
}

impl fmt::Display for Registry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.names.join(", "))?;
        if self.a_truncated {
            write!(f, " (a-truncated)")?;
        }
        Ok(())
    }
}

pub(crate) fn same(a: &Arc<Registry>, b: &Arc<Registry>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

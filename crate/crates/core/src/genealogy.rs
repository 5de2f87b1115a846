//! The labelled genealogy: a layered forest stored as per-generation parent
//! maps, plus the sibling partitions it induces.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::error::GenealogyError;
use crate::model::{Horizon, ModelSpec, VertexRef};

/// Parent maps are the source of truth. `parents[n][j]` is the zero-based
/// index in generation `n` of the parent of vertex `(n + 1, j + 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Genealogy {
    spec: ModelSpec,
    parents: Vec<Vec<u32>>,
}

impl Genealogy {
    /// Checks that every child has a parent in range and that each
    /// generation's out-degree profile is a permutation of its litters.
    pub fn from_parents(spec: ModelSpec, parents: Vec<Vec<u32>>) -> Result<Self, GenealogyError> {
        if parents.len() + 1 != spec.tau() {
            return Err(GenealogyError::ParentCount {
                generation: parents.len(),
                expected: spec.tau() - 1,
                found: parents.len(),
            });
        }
        for (n, p) in parents.iter().enumerate() {
            if p.len() != spec.size(n + 1) {
                return Err(GenealogyError::ParentCount {
                    generation: n + 1,
                    expected: spec.size(n + 1),
                    found: p.len(),
                });
            }
            let mut degrees = vec![0usize; spec.size(n)];
            for (j, &a) in p.iter().enumerate() {
                let a = a as usize;
                if a >= degrees.len() {
                    return Err(GenealogyError::ParentOutOfRange {
                        generation: n + 1,
                        index: j + 1,
                        parent: a + 1,
                    });
                }
                degrees[a] += 1;
            }
            degrees.sort_unstable_by(|a, b| b.cmp(a));
            if degrees != spec.litters(n) {
                return Err(GenealogyError::LitterProfile { generation: n });
            }
        }
        Ok(Self { spec, parents })
    }

    /// Trusted constructor for samplers that build valid maps by construction.
    pub(crate) fn from_parts(spec: ModelSpec, parents: Vec<Vec<u32>>) -> Self {
        debug_assert!(Self::from_parents(spec.clone(), parents.clone()).is_ok());
        Self { spec, parents }
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn tau(&self) -> usize {
        self.spec.tau()
    }

    /// Parent map of generation `n + 1` into generation `n`.
    pub fn parents_of_generation(&self, child_generation: usize) -> &[u32] {
        &self.parents[child_generation - 1]
    }

    pub fn parent_maps(&self) -> &[Vec<u32>] {
        &self.parents
    }

    pub fn into_parent_maps(self) -> Vec<Vec<u32>> {
        self.parents
    }

    /// Parent `a(v)` of a vertex in generation at least one.
    pub fn parent(&self, v: VertexRef) -> VertexRef {
        let p = self.parents[v.generation - 1][v.slot()] as usize;
        VertexRef::new(v.generation - 1, p + 1)
    }

    /// Out-degrees `K_n(i)` of generation `n`.
    pub fn out_degrees(&self, n: usize) -> Vec<usize> {
        let mut d = vec![0; self.spec.size(n)];
        if n + 1 < self.tau() {
            for &a in &self.parents[n] {
                d[a as usize] += 1;
            }
        }
        d
    }

    /// Offspring lists `O((n, i))`, children in increasing index order.
    pub fn children(&self, n: usize) -> Vec<Vec<usize>> {
        let mut c = vec![Vec::new(); self.spec.size(n)];
        if n + 1 < self.tau() {
            for (j, &a) in self.parents[n].iter().enumerate() {
                c[a as usize].push(j);
            }
        }
        c
    }

    /// Sibling partition `Xi_n` of generation `n + 1`, blocks ordered by
    /// parent index (childless parents omitted).
    pub fn sibling_partition(&self, n: usize) -> GenerationPartition {
        GenerationPartition::from_blocks_unchecked(self.children(n).into_iter().filter(|c| !c.is_empty()).collect())
    }

    /// Writes the flat parent-array format.
    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(self.to_text().as_bytes())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{FORMAT_HEADER}").unwrap();
        let h = match self.spec.horizon() {
            Horizon::Finite => "finite",
            Horizon::Capped => "capped",
        };
        writeln!(s, "horizon {h}").unwrap();
        writeln!(s, "sizes {}", join(self.spec.sizes().iter())).unwrap();
        for p in &self.parents {
            writeln!(s, "parents {}", join(p.iter().map(|a| a + 1))).unwrap();
        }
        s
    }

    /// Reads the flat parent-array format written by [`Genealogy::write_to`].
    pub fn read_from<R: BufRead>(r: R) -> Result<Self, GenealogyError> {
        let (g, _) = read_with_extras(r)?;
        Ok(g)
    }
}

pub(crate) const FORMAT_HEADER: &str = "# genealogy v1";

pub(crate) fn join<I: Iterator<Item = T>, T: ToString>(it: I) -> String {
    it.map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

/// An unrecognised `key value...` line of a genealogy file.
pub(crate) type ExtraLine = (String, Vec<usize>);

/// Parses a genealogy file, returning unrecognised `key value...` lines for
/// callers that extend the format (the spine line of a spinal tree).
pub(crate) fn read_with_extras<R: BufRead>(r: R) -> Result<(Genealogy, Vec<ExtraLine>), GenealogyError> {
    let bad = |line: usize, message: &str| GenealogyError::Format {
        line,
        message: message.to_string(),
    };
    let mut lines = r.lines().enumerate();
    let next = |lines: &mut dyn Iterator<Item = (usize, std::io::Result<String>)>| -> Result<Option<(usize, String)>, GenealogyError> {
        for (i, l) in lines {
            let l = l.map_err(|e| bad(i + 1, &e.to_string()))?;
            if !l.trim().is_empty() {
                return Ok(Some((i + 1, l)));
            }
        }
        Ok(None)
    };
    match next(&mut lines)? {
        Some((_, l)) if l.trim() == FORMAT_HEADER => {}
        Some((i, _)) => return Err(bad(i, "missing version header")),
        None => return Err(bad(1, "empty input")),
    }
    let mut horizon = None;
    let mut sizes = None;
    let mut parents: Vec<Vec<u32>> = Vec::new();
    let mut extras = Vec::new();
    while let Some((i, l)) = next(&mut lines)? {
        let mut parts = l.split_whitespace();
        let key = parts.next().unwrap_or_default();
        let rest: Vec<&str> = parts.collect();
        match key {
            "horizon" => {
                horizon = Some(match rest.as_slice() {
                    ["finite"] => Horizon::Finite,
                    ["capped"] => Horizon::Capped,
                    _ => return Err(bad(i, "horizon must be `finite` or `capped`")),
                })
            }
            _ => {
                let nums: Vec<usize> = rest
                    .iter()
                    .map(|t| t.parse::<usize>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| bad(i, "expected non-negative integers"))?;
                match key {
                    "sizes" => sizes = Some(nums),
                    "parents" => {
                        if nums.contains(&0) {
                            return Err(bad(i, "parent indices are 1-based"));
                        }
                        parents.push(nums.iter().map(|&a| (a - 1) as u32).collect())
                    }
                    other => extras.push((other.to_string(), nums)),
                }
            }
        }
    }
    let horizon = horizon.ok_or_else(|| bad(0, "missing horizon line"))?;
    let sizes = sizes.ok_or_else(|| bad(0, "missing sizes line"))?;
    let mut litters = Vec::new();
    for (n, p) in parents.iter().enumerate() {
        let Some(&x) = sizes.get(n) else {
            return Err(bad(0, "more parent lines than generations"));
        };
        let mut d = vec![0; x];
        for &a in p {
            if let Some(slot) = d.get_mut(a as usize) {
                *slot += 1;
            }
        }
        litters.push(d);
    }
    let spec = ModelSpec::new(horizon, sizes, litters)?;
    Ok((Genealogy::from_parents(spec, parents)?, extras))
}

/// A partition of `{0, ..., len - 1}` into non-empty blocks. Block order is
/// meaningful to some callers (ordered block lists) but not to equality of
/// partitions; use [`GenerationPartition::canonical`] to compare.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GenerationPartition {
    blocks: Vec<Vec<usize>>,
    len: usize,
}

impl GenerationPartition {
    /// Accepts blocks that are non-empty, disjoint and cover `0..len` for
    /// `len` the total number of elements.
    pub fn new(blocks: Vec<Vec<usize>>) -> Option<Self> {
        let len: usize = blocks.iter().map(Vec::len).sum();
        let mut seen = vec![false; len];
        for b in &blocks {
            if b.is_empty() {
                return None;
            }
            for &x in b {
                if x >= len || std::mem::replace(&mut seen[x], true) {
                    return None;
                }
            }
        }
        Some(Self::from_blocks_unchecked(blocks))
    }

    pub(crate) fn from_blocks_unchecked(mut blocks: Vec<Vec<usize>>) -> Self {
        for b in &mut blocks {
            b.sort_unstable();
        }
        let len = blocks.iter().map(Vec::len).sum();
        Self { blocks, len }
    }

    /// Contiguous blocks with the given sizes; zero sizes are skipped.
    pub fn contiguous(sizes: &[usize]) -> Self {
        let mut blocks = Vec::new();
        let mut start = 0;
        for &s in sizes.iter().filter(|&&s| s > 0) {
            blocks.push((start..start + s).collect());
            start += s;
        }
        Self::from_blocks_unchecked(blocks)
    }

    /// Partition induced by block labels: elements with equal labels share a
    /// block, blocks listed in order of least element.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut slot = std::collections::HashMap::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (x, &l) in labels.iter().enumerate() {
            let b = *slot.entry(l).or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[b].push(x);
        }
        Self::from_blocks_unchecked(blocks)
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Size of the underlying set.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    /// Block index of every element.
    pub fn block_of(&self) -> Vec<usize> {
        let mut out = vec![0; self.len];
        for (b, block) in self.blocks.iter().enumerate() {
            for &x in block {
                out[x] = b;
            }
        }
        out
    }

    /// Blocks sorted by least element.
    pub fn canonical(&self) -> Vec<Vec<usize>> {
        let mut b = self.blocks.clone();
        b.sort_unstable_by_key(|b| b[0]);
        b
    }

    /// True when the block list is increasing in least element.
    pub fn sorted_by_least_element(&self) -> bool {
        self.blocks.windows(2).all(|w| w[0][0] < w[1][0])
    }
}

use super::Graph;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

/// Position of a node inside the cell grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CellCoord {
    pub row: usize,
    pub col: usize,
    pub side: Side,
    pub index: usize,
}

/// A `rows × cols` grid of K_{4,4} unit cells.
///
/// Node ids are `8 (row · cols + col) + 4 side + index` with `side` 0 for
/// the left shore. Left nodes couple to the same index in the cell below,
/// right nodes to the same index in the cell to the right.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChimeraGraph {
    rows: usize,
    cols: usize,
    graph: Graph,
}

impl ChimeraGraph {
    /// The square graph C_L with `8 L²` nodes.
    pub fn new(size: usize) -> Result<Self> {
        Self::rectangular(size, size)
    }

    pub fn rectangular(rows: usize, cols: usize) -> Result<Self> {
        if rows < 1 || cols < 1 {
            return Err(Error::invalid(format!("Chimera grid must be at least 1x1, got {rows}x{cols}")));
        }
        let mut edges = Vec::with_capacity(16 * rows * cols + 4 * (rows - 1) * cols + 4 * rows * (cols - 1));
        let id = |row, col, side: usize, index| 8 * (row * cols + col) + 4 * side + index;
        for row in 0..rows {
            for col in 0..cols {
                for a in 0..4 {
                    for b in 0..4 {
                        edges.push((id(row, col, 0, a), id(row, col, 1, b)));
                    }
                }
                for k in 0..4 {
                    if row + 1 < rows {
                        edges.push((id(row, col, 0, k), id(row + 1, col, 0, k)));
                    }
                    if col + 1 < cols {
                        edges.push((id(row, col, 1, k), id(row, col + 1, 1, k)));
                    }
                }
            }
        }
        let graph = Graph::new(8 * rows * cols, edges)?;
        Ok(Self { rows, cols, graph })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// `L` for square graphs.
    pub fn size(&self) -> Option<usize> {
        (self.rows == self.cols).then_some(self.rows)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn num_nodes(&self) -> usize {
        self.graph.num_nodes()
    }

    pub fn num_cells(&self) -> usize {
        self.rows * self.cols
    }

    pub fn node_id(&self, c: CellCoord) -> usize {
        let side = match c.side {
            Side::Left => 0,
            Side::Right => 1,
        };
        8 * (c.row * self.cols + c.col) + 4 * side + c.index
    }

    pub fn cell_of(&self, node: usize) -> CellCoord {
        assert!(node < self.num_nodes(), "node {node} out of range");
        let cell = node / 8;
        CellCoord {
            row: cell / self.cols,
            col: cell % self.cols,
            side: if node % 8 < 4 { Side::Left } else { Side::Right },
            index: node % 4,
        }
    }

    /// Linear cell index `row · cols + col` of a node.
    pub fn cell_index(&self, node: usize) -> usize {
        node / 8
    }

    pub fn is_inter_cell(&self, a: usize, b: usize) -> bool {
        self.cell_index(a) != self.cell_index(b)
    }
}

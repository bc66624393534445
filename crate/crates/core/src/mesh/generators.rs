use std::collections::HashMap;

use super::{Mesh, Point2, Triangle};

fn split_cells(vertices: Vec<Point2>, cells: &[[usize; 4]]) -> Mesh {
    // Cell corners are (sw, se, ne, nw); the diagonal runs sw -> ne.
    let triangles = cells
        .iter()
        .flat_map(|&[sw, se, ne, nw]| {
            [
                Triangle {
                    vertices: [sw, se, ne],
                    refinement_edge: 0,
                    parent: None,
                },
                Triangle {
                    vertices: [sw, ne, nw],
                    refinement_edge: 0,
                    parent: None,
                },
            ]
        })
        .collect();
    Mesh::from_parts(vertices, triangles, &HashMap::new())
        .expect("generated mesh is valid")
        .with_longest_edge_marking()
}

/// Structured mesh of (0,1)² with `2n²` triangles, all boundary Dirichlet.
pub fn unit_square_mesh(n: usize) -> Mesh {
    assert!(n >= 1, "unit_square_mesh needs n >= 1");
    let h = 1.0 / n as f64;
    let vertices = (0..=n)
        .flat_map(|j| (0..=n).map(move |i| Point2::new(i as f64 * h, j as f64 * h)))
        .collect();
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let cells: Vec<[usize; 4]> = (0..n)
        .flat_map(|j| (0..n).map(move |i| (i, j)))
        .map(|(i, j)| [id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)])
        .collect();
    split_cells(vertices, &cells)
}

/// Six-triangle mesh of (−1,1)² \ [0,1]×[−1,0]; the re-entrant corner is
/// vertex 3 at the origin.
pub fn l_shape_mesh() -> Mesh {
    let vertices = vec![
        Point2::new(-1.0, -1.0),
        Point2::new(0.0, -1.0),
        Point2::new(-1.0, 0.0),
        Point2::new(0.0, 0.0),
        Point2::new(1.0, 0.0),
        Point2::new(-1.0, 1.0),
        Point2::new(0.0, 1.0),
        Point2::new(1.0, 1.0),
    ];
    let cells = [[0, 1, 3, 2], [2, 3, 6, 5], [3, 4, 7, 6]];
    split_cells(vertices, &cells)
}

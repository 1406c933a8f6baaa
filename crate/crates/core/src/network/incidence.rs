//! Plant-animal incidence grids as distributed by interaction-network
//! repositories: rows are plants, columns are animals, cells are visit
//! counts or weights. Comma- or whitespace-separated, with an optional
//! header row and an optional leading label column.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binary plant x animal incidence matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Incidence {
    plants: usize,
    animals: usize,
    links: Vec<bool>,
}

impl Incidence {
    pub fn new(plants: usize, animals: usize, links: Vec<bool>) -> Result<Self> {
        if plants == 0 || animals == 0 {
            return Err(Error::EmptyNetwork);
        }
        if links.len() != plants * animals {
            return Err(Error::DimensionMismatch {
                expected: plants * animals,
                actual: links.len(),
            });
        }
        Ok(Self {
            plants,
            animals,
            links,
        })
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let animals = rows.first().map_or(0, Vec::len);
        let mut links = Vec::with_capacity(rows.len() * animals);
        for row in rows {
            if row.len() != animals {
                return Err(Error::DimensionMismatch {
                    expected: animals,
                    actual: row.len(),
                });
            }
            links.extend(row.iter().map(|&v| v != 0));
        }
        Self::new(rows.len(), animals, links)
    }

    pub fn plants(&self) -> usize {
        self.plants
    }

    pub fn animals(&self) -> usize {
        self.animals
    }

    pub fn species(&self) -> usize {
        self.plants + self.animals
    }

    #[inline]
    pub fn linked(&self, plant: usize, animal: usize) -> bool {
        self.links[plant * self.animals + animal]
    }

    pub fn plant_degree(&self, plant: usize) -> usize {
        (0..self.animals).filter(|&a| self.linked(plant, a)).count()
    }

    pub fn animal_degree(&self, animal: usize) -> usize {
        (0..self.plants).filter(|&p| self.linked(p, animal)).count()
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Reject networks whose total species count is at or above this value.
    pub size_cap: Option<usize>,
}

fn clean(token: &str) -> &str {
    token.trim().trim_matches('"').trim_matches('\'').trim()
}

fn numeric(token: &str) -> Option<f64> {
    clean(token).parse::<f64>().ok()
}

/// Parses an incidence grid. Strictly positive cells become links.
pub fn parse_incidence(text: &str, opts: ParseOptions) -> Result<Incidence> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .collect();
    if lines.is_empty() {
        return Err(Error::EmptyNetwork);
    }
    let comma = lines.iter().any(|(_, l)| l.contains(','));
    let mut rows: Vec<(usize, Vec<&str>)> = lines
        .iter()
        .map(|&(n, l)| {
            let cells = if comma {
                l.split(',').collect()
            } else {
                l.split_whitespace().collect()
            };
            (n, cells)
        })
        .collect();

    if rows[0].1.iter().any(|c| numeric(c).is_none()) {
        rows.remove(0);
    }
    if rows.is_empty() {
        return Err(Error::EmptyNetwork);
    }
    let labelled = rows.iter().all(|(_, r)| r.first().is_some_and(|c| numeric(c).is_none()));
    let skip = usize::from(labelled);

    let width = rows[0].1.len().saturating_sub(skip);
    if width == 0 {
        return Err(Error::EmptyNetwork);
    }
    let mut links = Vec::with_capacity(rows.len() * width);
    for (line, cells) in &rows {
        if cells.len() - skip.min(cells.len()) != width {
            return Err(Error::MalformedFile {
                line: *line,
                reason: format!("expected {width} cells, found {}", cells.len().saturating_sub(skip)),
            });
        }
        for cell in &cells[skip..] {
            let v = numeric(cell).ok_or_else(|| Error::MalformedFile {
                line: *line,
                reason: format!("non-numeric cell {:?}", clean(cell)),
            })?;
            if !v.is_finite() || v < 0.0 {
                return Err(Error::MalformedFile {
                    line: *line,
                    reason: format!("cell {v} is not a non-negative number"),
                });
            }
            links.push(v > 0.0);
        }
    }
    let inc = Incidence::new(rows.len(), width, links)?;
    if let Some(cap) = opts.size_cap {
        if inc.species() >= cap {
            return Err(Error::SizeCapExceeded {
                species: inc.species(),
                cap,
            });
        }
    }
    Ok(inc)
}

pub fn read_incidence(path: &Path, opts: ParseOptions) -> Result<Incidence> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_incidence(&text, opts)
}

//! Virtual keyboard geometry.
//!
//! Insertion errors are attributed to whichever adjacent character sits
//! nearer on a physical keyboard, so the layout maps every alphabet character
//! to staggered grid coordinates. The layout is data, not code: the bundled
//! table is a US QWERTY letter block, but any restricted alphabet can be
//! swapped in through [`KeyboardLayout::parse`].

use std::collections::HashMap;
use std::fmt;

use rand::Rng;

use crate::alphabet::Alphabet;
use crate::error::{Error, Result};

/// Which neighbor an inserted character is attributed to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    AttachLeft,
    AttachRight,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::AttachLeft => write!(f, "left"),
            Side::AttachRight => write!(f, "right"),
        }
    }
}

/// Key positions on a staggered grid, one key width per unit.
#[derive(Debug, Clone, PartialEq)]
pub struct KeyboardLayout {
    // char -> (x, y) with the row offset already folded into x
    positions: HashMap<char, (f64, f64)>,
}

impl KeyboardLayout {
    /// The bundled US QWERTY letter block (26 lowercase letters, rows
    /// staggered by 0.5 and 0.75 key widths).
    pub fn qwerty() -> Self {
        Self::parse(include_str!("../data/qwerty.txt"))
            .expect("bundled layout table must be valid")
    }

    /// Parse a layout table.
    ///
    /// Lines starting with `#` are comments. `offset ROW X` declares the
    /// horizontal stagger of a row; `CHAR ROW COLUMN` places a key. Offsets
    /// must precede the keys of their row only in the sense that they apply
    /// to the whole table: all offsets are read first.
    pub fn parse(table: &str) -> Result<Self> {
        let mut offsets: HashMap<u32, f64> = HashMap::new();
        let mut keys: Vec<(char, u32, f64)> = Vec::new();

        for (lineno, line) in table.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(Error::InvalidLayout(format!(
                    "line {}: expected 3 fields, found {}",
                    lineno + 1,
                    fields.len()
                )));
            }
            let row: u32 = fields[1].parse().map_err(|_| {
                Error::InvalidLayout(format!("line {}: bad row {:?}", lineno + 1, fields[1]))
            })?;
            let value: f64 = fields[2].parse().map_err(|_| {
                Error::InvalidLayout(format!("line {}: bad column {:?}", lineno + 1, fields[2]))
            })?;
            if fields[0] == "offset" {
                offsets.insert(row, value);
            } else {
                let mut cs = fields[0].chars();
                let (c, rest) = (cs.next(), cs.next());
                match (c, rest) {
                    (Some(c), None) => keys.push((c, row, value)),
                    _ => {
                        return Err(Error::InvalidLayout(format!(
                            "line {}: key field {:?} is not a single character",
                            lineno + 1,
                            fields[0]
                        )))
                    }
                }
            }
        }

        let mut positions = HashMap::new();
        for (c, row, column) in keys {
            let x = column + offsets.get(&row).copied().unwrap_or(0.0);
            let y = f64::from(row);
            if positions.insert(c, (x, y)).is_some() {
                return Err(Error::InvalidLayout(format!("duplicate key {c:?}")));
            }
        }
        if positions.is_empty() {
            return Err(Error::InvalidLayout("no keys defined".into()));
        }

        // no two keys may share a position
        let mut seen: Vec<(f64, f64)> = Vec::with_capacity(positions.len());
        for &(x, y) in positions.values() {
            if seen.iter().any(|&(sx, sy)| sx == x && sy == y) {
                return Err(Error::InvalidLayout(format!(
                    "two keys share position ({x}, {y})"
                )));
            }
            seen.push((x, y));
        }

        Ok(Self { positions })
    }

    /// The characters this layout covers, as an [`Alphabet`].
    pub fn alphabet(&self) -> Alphabet {
        Alphabet::new(self.positions.keys().copied())
    }

    pub fn contains(&self, c: char) -> bool {
        self.positions.contains_key(&c)
    }

    /// Euclidean distance between two keys in key-width units.
    pub fn key_distance(&self, a: char, b: char) -> Result<f64> {
        let &(ax, ay) = self.positions.get(&a).ok_or(Error::CharNotInLayout(a))?;
        let &(bx, by) = self.positions.get(&b).ok_or(Error::CharNotInLayout(b))?;
        Ok(((ax - bx).powi(2) + (ay - by).powi(2)).sqrt())
    }

    /// Attribute an inserted character to the adjacent character nearer to it
    /// on the keyboard. Equal distances are resolved by one fair draw from
    /// `rng`; a missing neighbor forces the other side.
    pub fn attribute_insertion<R: Rng + ?Sized>(
        &self,
        left: Option<char>,
        inserted: char,
        right: Option<char>,
        rng: &mut R,
    ) -> Result<Side> {
        match (left, right) {
            (None, None) => Err(Error::NoNeighbor),
            (Some(_), None) => Ok(Side::AttachLeft),
            (None, Some(_)) => Ok(Side::AttachRight),
            (Some(l), Some(r)) => {
                let dl = self.key_distance(inserted, l)?;
                let dr = self.key_distance(inserted, r)?;
                if dl < dr {
                    Ok(Side::AttachLeft)
                } else if dr < dl {
                    Ok(Side::AttachRight)
                } else if rng.random::<bool>() {
                    Ok(Side::AttachLeft)
                } else {
                    Ok(Side::AttachRight)
                }
            }
        }
    }
}

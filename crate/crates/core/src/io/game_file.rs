use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::game::{FiniteGame, PotentialTable};
use crate::{Error, Result};

/// A number or an array of nested arrays of numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Nested {
    Leaf(f64),
    Node(Vec<Nested>),
}

impl Nested {
    /// Flattens in row-major order, checking the array shape level by level.
    fn flatten(&self, shape: &[usize], what: &str) -> std::result::Result<Vec<f64>, String> {
        let mut out = Vec::with_capacity(shape.iter().product());
        self.flatten_into(shape, what, &mut out)?;
        Ok(out)
    }

    fn flatten_into(&self, shape: &[usize], what: &str, out: &mut Vec<f64>) -> std::result::Result<(), String> {
        match (self, shape) {
            (Nested::Leaf(v), []) => {
                out.push(*v);
                Ok(())
            }
            (Nested::Node(items), [n, rest @ ..]) => {
                if items.len() != *n {
                    return Err(format!("{what}: expected {n} entries at depth {}, found {}", out.len(), items.len()));
                }
                items.iter().try_for_each(|it| it.flatten_into(rest, what, out))
            }
            (Nested::Leaf(_), _) => Err(format!("{what}: array nested less deeply than the {} players", shape.len())),
            (Nested::Node(_), []) => Err(format!("{what}: array nested more deeply than the players")),
        }
    }

    /// Builds the nested form of a row-major table.
    pub fn from_flat(values: &[f64], shape: &[usize]) -> Nested {
        match shape {
            [] => Nested::Leaf(values[0]),
            [n, rest @ ..] => {
                let block: usize = rest.iter().product();
                Nested::Node((0..*n).map(|k| Nested::from_flat(&values[k * block..(k + 1) * block], rest)).collect())
            }
        }
    }
}

/// Semantic problem in a parsed document, tied to the field it concerns.
struct Invalid {
    field: &'static str,
    message: String,
}

fn invalid(field: &'static str, message: impl Into<String>) -> Invalid {
    Invalid { field, message: message.into() }
}

/// On-disk finite game: `players`, `action_sets` and one nested utility array
/// per player, indexed row-major by action index (player 1 outermost).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameDocument {
    pub players: usize,
    pub action_sets: Vec<Vec<f64>>,
    pub utilities: Vec<Nested>,
}

impl GameDocument {
    pub fn from_game(game: &FiniteGame) -> Self {
        let shape = game.shape();
        GameDocument {
            players: game.player_count(),
            action_sets: game.action_sets().to_vec(),
            utilities: game.tables().iter().map(|t| Nested::from_flat(t, &shape)).collect(),
        }
    }

    fn build(&self) -> std::result::Result<FiniteGame, Invalid> {
        if self.players != self.action_sets.len() {
            return Err(invalid("action_sets", format!("players = {} but {} action sets", self.players, self.action_sets.len())));
        }
        if self.players != self.utilities.len() {
            return Err(invalid("utilities", format!("players = {} but {} utility arrays", self.players, self.utilities.len())));
        }
        let shape: Vec<usize> = self.action_sets.iter().map(Vec::len).collect();
        let tables = self
            .utilities
            .iter()
            .enumerate()
            .map(|(i, u)| u.flatten(&shape, &format!("utilities[{i}]")))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|m| invalid("utilities", m))?;
        FiniteGame::new(self.action_sets.clone(), tables).map_err(|e| invalid("action_sets", e.to_string()))
    }
}

/// On-disk potential candidate: the game's `players` and `action_sets` and one
/// nested `potential` array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialDocument {
    pub players: usize,
    pub action_sets: Vec<Vec<f64>>,
    pub potential: Nested,
}

impl PotentialDocument {
    pub fn from_table(game: &FiniteGame, table: &PotentialTable) -> Self {
        PotentialDocument {
            players: game.player_count(),
            action_sets: game.action_sets().to_vec(),
            potential: Nested::from_flat(table.values(), table.shape()),
        }
    }

    fn build(&self, game: &FiniteGame) -> std::result::Result<PotentialTable, Invalid> {
        if self.players != self.action_sets.len() {
            return Err(invalid("action_sets", format!("players = {} but {} action sets", self.players, self.action_sets.len())));
        }
        if self.action_sets != game.action_sets() {
            return Err(invalid("action_sets", "action sets differ from the game's"));
        }
        let shape: Vec<usize> = self.action_sets.iter().map(Vec::len).collect();
        let values = self.potential.flatten(&shape, "potential").map_err(|m| invalid("potential", m))?;
        PotentialTable::new(shape, values).map_err(|e| invalid("potential", e.to_string()))
    }
}

/// Line and column of the first `"field"` key in `text`, or (1, 1).
fn locate(text: &str, field: &str) -> (usize, usize) {
    let key = format!("\"{field}\"");
    match text.find(&key) {
        Some(at) => {
            let before = &text[..at];
            let line = before.matches('\n').count() + 1;
            let column = at - before.rfind('\n').map_or(0, |p| p + 1) + 1;
            (line, column)
        }
        None => (1, 1),
    }
}

fn semantic_error(path: &Path, text: &str, e: Invalid) -> Error {
    let (line, column) = locate(text, e.field);
    Error::Parse { path: path.to_path_buf(), line, column, message: e.message }
}

fn parse_error(path: &Path, e: serde_json::Error) -> Error {
    let full = e.to_string();
    let suffix = format!(" at line {} column {}", e.line(), e.column());
    let message = full.strip_suffix(&suffix).unwrap_or(&full).to_string();
    Error::Parse { path: path.to_path_buf(), line: e.line(), column: e.column(), message }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: 0,
        column: 0,
        message: format!("cannot read file: {e}"),
    })
}

pub fn parse_game(path: &Path, text: &str) -> Result<FiniteGame> {
    let doc: GameDocument = serde_json::from_str(text).map_err(|e| parse_error(path, e))?;
    doc.build().map_err(|e| semantic_error(path, text, e))
}

pub fn load_game(path: &Path) -> Result<FiniteGame> {
    parse_game(path, &read(path)?)
}

pub fn parse_potential(path: &Path, text: &str, game: &FiniteGame) -> Result<PotentialTable> {
    let doc: PotentialDocument = serde_json::from_str(text).map_err(|e| parse_error(path, e))?;
    doc.build(game).map_err(|e| semantic_error(path, text, e))
}

/// Loads a potential written for `game`'s action sets.
pub fn load_potential(path: &Path, game: &FiniteGame) -> Result<PotentialTable> {
    parse_potential(path, &read(path)?, game)
}

pub fn save_game(path: &Path, game: &FiniteGame) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(&GameDocument::from_game(game))? + "\n")?;
    Ok(())
}

pub fn save_potential(path: &Path, game: &FiniteGame, table: &PotentialTable) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(&PotentialDocument::from_table(game, table))? + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const PENNIES: &str = r#"{
  "players": 2,
  "action_sets": [[0, 1], [0, 1]],
  "utilities": [
    [[1, -1], [-1, 1]],
    [[-1, 1], [1, -1]]
  ]
}"#;

    #[test]
    fn parses_nested_tables() {
        let g = parse_game(Path::new("pennies.json"), PENNIES).unwrap();
        assert_eq!(g.table(0), &[1.0, -1.0, -1.0, 1.0]);
        assert_eq!(g.table(1), &[-1.0, 1.0, 1.0, -1.0]);
    }

    #[test]
    fn errors_carry_path_and_line() {
        let bad = PENNIES.replace("[[-1, 1], [1, -1]]", "[[-1, 1], [1]]");
        match parse_game(Path::new("bad.json"), &bad) {
            Err(Error::Parse { path, line, message, .. }) => {
                assert_eq!(path, Path::new("bad.json"));
                assert_eq!(line, 4, "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
        let unknown = PENNIES.replace("\"players\"", "\"extra\": 1, \"players\"");
        assert!(matches!(parse_game(Path::new("x.json"), &unknown), Err(Error::Parse { .. })));
        let broken = &PENNIES[..40];
        assert!(matches!(parse_game(Path::new("x.json"), broken), Err(Error::Parse { .. })));
    }

    #[test]
    fn round_trip_through_files() {
        let dir = tempfile::tempdir().unwrap();
        let g = FiniteGame::from_fn(vec![vec![0.0, 0.5, 2.0], vec![1.0, 3.0]], |i, v| v[0] * 0.1 + v[1] * (i as f64 + 1.0) / 3.0).unwrap();
        let path = dir.path().join("g.json");
        save_game(&path, &g).unwrap();
        assert_eq!(load_game(&path).unwrap(), g);
        let phi = PotentialTable::from_fn(&g, |v| v[0] - v[1] / 7.0).unwrap();
        let ppath = dir.path().join("phi.json");
        save_potential(&ppath, &g, &phi).unwrap();
        assert_eq!(load_potential(&ppath, &g).unwrap(), phi);
    }
}

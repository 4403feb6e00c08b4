//! Game sources: `example:<id>` shorthands or JSON files on disk.

use std::fs;
use std::path::Path;

use stackrobust::ensembles::example_game;
use stackrobust::NormalFormGame;

use crate::error::{CliError, Result};

/// Load a game from a CLI argument: `example:1|2|3` or a JSON file path.
pub fn load_game(source: &str) -> Result<NormalFormGame> {
    if let Some(raw) = source.strip_prefix("example:") {
        let id: u32 = raw
            .parse()
            .map_err(|_| CliError::Config(format!("bad example id {raw:?} (want 1, 2 or 3)")))?;
        return example_game(id).map_err(|e| CliError::GameLoad(e.to_string()));
    }
    load_game_file(Path::new(source))
}

/// Load `{"name", "leader_payoffs", "follower_payoffs"}` JSON from disk.
pub fn load_game_file(path: &Path) -> Result<NormalFormGame> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::GameLoad(format!("{}: {e}", path.display())))?;
    NormalFormGame::from_json(&text)
        .map_err(|e| CliError::GameLoad(format!("{}: {e}", path.display())))
}

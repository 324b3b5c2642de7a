use crate::{CliResult, Command, Ctx, Outcome};

mod consensus;
mod entangle;
mod entropy;
mod foundations;
mod game;
mod state;
mod temporal;

/// Runs one command; returns its display name and outcome.
pub fn dispatch(command: &Command, ctx: &Ctx) -> CliResult<(String, Outcome)> {
    match command {
        Command::State(c) => state::run(c, ctx),
        Command::Entangle(c) => entangle::run(c, ctx),
        Command::Entropy(c) => entropy::run(c, ctx),
        Command::Swap(a) => temporal::swap(a, ctx),
        Command::Chain(c) => temporal::chain(c, ctx),
        Command::Consensus(c) => consensus::run(c, ctx),
        Command::Game(c) => game::run(c, ctx),
        Command::Gleason(c) => foundations::gleason(c, ctx),
        Command::Lg(c) => foundations::lg(c, ctx),
    }
}

/// Bit string of `index` over `n` qubits, qubit 0 first.
pub(crate) fn bits(index: usize, n: usize) -> String {
    (0..n).map(|q| if (index >> (n - 1 - q)) & 1 == 1 { '1' } else { '0' }).collect()
}

//! Enumeration and simulation of `s`-symbol, `k`-state Turing machines.
//!
//! The rule space has no halting state: each of the `s·k` (state, scanned
//! symbol) slots holds one of `2·s·k` actions, giving `(2sk)^(sk)` machines.
//!
//! Action codes are `write·2k + move·k + (next_state − 1)` with
//! `Left = 0`, `Right = 1`. A machine index is the mixed-radix number whose
//! digit for slot `(state − 1)·s + symbol` has weight `(2sk)^slot`, so slot 0
//! (state 1 reading symbol 0) is the least significant digit.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Move {
    Left,
    Right,
}

impl Move {
    fn code(self) -> u64 {
        match self {
            Move::Left => 0,
            Move::Right => 1,
        }
    }

    fn delta(self) -> i64 {
        match self {
            Move::Left => -1,
            Move::Right => 1,
        }
    }
}

/// Tail of a 5-tuple rule: what to write, where to move, which state to enter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TmAction {
    pub write: u8,
    #[serde(rename = "move")]
    pub movement: Move,
    /// 1-based.
    pub next_state: u8,
}

impl TmAction {
    /// Integer code in `[0, 2·symbols·states)`.
    pub fn encode(self, states: u8) -> u64 {
        let k = u64::from(states);
        u64::from(self.write) * 2 * k + self.movement.code() * k + u64::from(self.next_state - 1)
    }

    pub fn decode(code: u64, symbols: u8, states: u8) -> Result<Self> {
        let k = u64::from(states);
        let size = 2 * u64::from(symbols) * k;
        if code >= size {
            return Err(Error::OutOfRange { index: code, size });
        }
        Ok(Self {
            write: (code / (2 * k)) as u8,
            movement: if (code / k) & 1 == 0 {
                Move::Left
            } else {
                Move::Right
            },
            next_state: (code % k) as u8 + 1,
        })
    }
}

/// Number of machines with the given alphabet size and state count.
pub fn tm_space_size(symbols: u8, states: u8) -> Result<u64> {
    check_shape(symbols, states)?;
    let base = 2 * u64::from(symbols) * u64::from(states);
    let digits = u32::from(symbols) * u32::from(states);
    base.checked_pow(digits).ok_or_else(|| {
        Error::Capacity(format!(
            "({base})^{digits} machines for {symbols} symbols and {states} states overflows a 64-bit index"
        ))
    })
}

fn check_shape(symbols: u8, states: u8) -> Result<()> {
    if symbols == 0 || states == 0 {
        return Err(Error::Config(format!(
            "symbols and states must be at least 1 (got {symbols}, {states})"
        )));
    }
    Ok(())
}

/// A total transition table.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TmProgram {
    symbols: u8,
    states: u8,
    table: Vec<TmAction>,
    index: u64,
}

impl TmProgram {
    /// Builds a program from actions listed in slot order (see module docs).
    pub fn from_table(symbols: u8, states: u8, table: Vec<TmAction>) -> Result<Self> {
        let size = tm_space_size(symbols, states)?;
        let slots = usize::from(symbols) * usize::from(states);
        if table.len() != slots {
            return Err(Error::Config(format!(
                "transition table needs {slots} entries, got {}",
                table.len()
            )));
        }
        for action in &table {
            if action.write >= symbols || action.next_state == 0 || action.next_state > states {
                return Err(Error::Config(format!(
                    "action {action:?} is outside the rule space"
                )));
            }
        }
        let base = 2 * u64::from(symbols) * u64::from(states);
        let index = table
            .iter()
            .rev()
            .fold(0u64, |acc, action| acc * base + action.encode(states));
        debug_assert!(index < size);
        Ok(Self {
            symbols,
            states,
            table,
            index,
        })
    }

    pub fn decode(index: u64, symbols: u8, states: u8) -> Result<Self> {
        let size = tm_space_size(symbols, states)?;
        if index >= size {
            return Err(Error::OutOfRange { index, size });
        }
        let base = 2 * u64::from(symbols) * u64::from(states);
        let slots = usize::from(symbols) * usize::from(states);
        let mut rest = index;
        let mut table = Vec::with_capacity(slots);
        for _ in 0..slots {
            table.push(TmAction::decode(rest % base, symbols, states)?);
            rest /= base;
        }
        Ok(Self {
            symbols,
            states,
            table,
            index,
        })
    }

    pub fn encode(&self) -> u64 {
        self.index
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn symbols(&self) -> u8 {
        self.symbols
    }

    pub fn states(&self) -> u8 {
        self.states
    }

    pub fn table(&self) -> &[TmAction] {
        &self.table
    }

    /// Action for a 1-based `state` scanning `symbol`.
    #[inline]
    pub fn action(&self, state: u8, symbol: u8) -> TmAction {
        self.table[usize::from(state - 1) * usize::from(self.symbols) + usize::from(symbol)]
    }

    /// The program with symbols 0 and 1 exchanged in both the scanned-symbol
    /// slots and the written symbols. Binary machines only.
    pub fn symbol_swapped(&self) -> Result<Self> {
        if self.symbols != 2 {
            return Err(Error::Config(
                "symbol swap is defined for 2-symbol machines".into(),
            ));
        }
        let mut table = Vec::with_capacity(self.table.len());
        for state in 1..=self.states {
            for symbol in 0..2u8 {
                let a = self.action(state, 1 - symbol);
                table.push(TmAction {
                    write: 1 - a.write,
                    ..a
                });
            }
        }
        Self::from_table(2, self.states, table)
    }

    /// Runs from a uniform tape for exactly `steps` transitions.
    pub fn run(&self, background: u8, steps: u64) -> TmRun {
        let mut config = TmConfiguration::new(background);
        for _ in 0..steps {
            config.step(self);
        }
        TmRun {
            output: config.visited_output(),
            config,
        }
    }
}

impl fmt::Display for TmProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "# machine {} ({} symbols, {} states)",
            self.index, self.symbols, self.states
        )?;
        for state in 1..=self.states {
            for symbol in 0..self.symbols {
                let a = self.action(state, symbol);
                let dir = match a.movement {
                    Move::Left => 'L',
                    Move::Right => 'R',
                };
                writeln!(
                    f,
                    "state {state} read {symbol} -> write {} move {dir} state {} (code {})",
                    a.write,
                    a.next_state,
                    a.encode(self.states)
                )?;
            }
        }
        Ok(())
    }
}

/// Ascending-index stream over the whole rule space.
pub fn enumerate_tm(symbols: u8, states: u8) -> Result<impl Iterator<Item = TmProgram>> {
    let size = tm_space_size(symbols, states)?;
    Ok((0..size).map(move |i| TmProgram::decode(i, symbols, states).expect("index within space")))
}

/// Two-sided tape that is uniform outside a finite window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tape {
    cells: VecDeque<u8>,
    /// Cell index of `cells[0]`.
    first: i64,
    background: u8,
}

impl Tape {
    pub fn new(background: u8) -> Self {
        Self {
            cells: VecDeque::from([background]),
            first: 0,
            background,
        }
    }

    pub fn background(&self) -> u8 {
        self.background
    }

    pub fn get(&self, cell: i64) -> u8 {
        let offset = cell - self.first;
        if offset < 0 {
            return self.background;
        }
        self.cells
            .get(offset as usize)
            .copied()
            .unwrap_or(self.background)
    }

    pub fn set(&mut self, cell: i64, symbol: u8) {
        while cell < self.first {
            self.cells.push_front(self.background);
            self.first -= 1;
        }
        let offset = (cell - self.first) as usize;
        if offset >= self.cells.len() {
            self.cells.resize(offset + 1, self.background);
        }
        self.cells[offset] = symbol;
    }
}

/// Machine state during a run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TmConfiguration {
    pub tape: Tape,
    pub head: i64,
    /// 1-based.
    pub state: u8,
    pub visited_min: i64,
    pub visited_max: i64,
    pub step: u64,
}

impl TmConfiguration {
    pub fn new(background: u8) -> Self {
        Self {
            tape: Tape::new(background),
            head: 0,
            state: 1,
            visited_min: 0,
            visited_max: 0,
            step: 0,
        }
    }

    #[inline]
    pub fn step(&mut self, program: &TmProgram) {
        let action = program.action(self.state, self.tape.get(self.head));
        self.tape.set(self.head, action.write);
        self.head += action.movement.delta();
        self.state = action.next_state;
        self.visited_min = self.visited_min.min(self.head);
        self.visited_max = self.visited_max.max(self.head);
        self.step += 1;
    }

    /// Tape content over every cell the head has occupied, left to right.
    pub fn visited_output(&self) -> Vec<u8> {
        (self.visited_min..=self.visited_max)
            .map(|cell| self.tape.get(cell))
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct TmRun {
    /// Symbols over `[visited_min, visited_max]`, including the cell under the head.
    pub output: Vec<u8>,
    pub config: TmConfiguration,
}

/// Convenience wrapper matching the free-function form used by callers.
pub fn run_tm(program: &TmProgram, background: u8, steps: u64) -> TmRun {
    program.run(background, steps)
}

//! Radius-1 binary (elementary) cellular automata grown from a single seed cell.

use std::fmt;

/// Number of elementary rules.
pub const ECA_SPACE_SIZE: u64 = 256;

/// Wolfram-numbered rule: neighborhood `b2 b1 b0` maps to bit `4·b2 + 2·b1 + b0` of the number.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EcaRule(u8);

impl EcaRule {
    pub fn new(number: u8) -> Self {
        Self(number)
    }

    pub fn number(self) -> u8 {
        self.0
    }

    #[inline]
    pub fn apply(self, left: u8, center: u8, right: u8) -> u8 {
        (self.0 >> ((left << 2) | (center << 1) | right)) & 1
    }

    /// Output for each neighborhood, indexed by its 3-bit value.
    pub fn table(self) -> [u8; 8] {
        std::array::from_fn(|i| (self.0 >> i) & 1)
    }
}

impl fmt::Display for EcaRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rule {}:", self.0)?;
        for neighborhood in (0..8u8).rev() {
            write!(f, " {:03b}->{}", neighborhood, (self.0 >> neighborhood) & 1)?;
        }
        Ok(())
    }
}

pub fn enumerate_eca() -> impl Iterator<Item = EcaRule> {
    (0..=255u8).map(EcaRule)
}

/// The light cone of a single-seed evolution. Cells outside `cells` all hold `background`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EcaRow {
    pub cells: Vec<u8>,
    /// Position of the seed cell within `cells`.
    pub origin_offset: usize,
    pub background: u8,
    pub step: u64,
}

impl EcaRow {
    /// A single `1 − background` cell on a uniform background.
    pub fn seed(background: u8) -> Self {
        Self {
            cells: vec![1 - background],
            origin_offset: 0,
            background,
            step: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

/// One synchronous update. The row widens by one cell per side and the
/// background is itself updated as a uniform neighborhood.
pub fn step_eca(rule: EcaRule, row: &EcaRow) -> EcaRow {
    let bg = row.background;
    let old = &row.cells;
    let at = |i: isize| -> u8 {
        if i < 0 || i as usize >= old.len() {
            bg
        } else {
            old[i as usize]
        }
    };
    let cells = (0..old.len() as isize + 2)
        .map(|i| rule.apply(at(i - 2), at(i - 1), at(i)))
        .collect();
    EcaRow {
        cells,
        origin_offset: row.origin_offset + 1,
        background: rule.apply(bg, bg, bg),
        step: row.step + 1,
    }
}

/// Final row after `steps` updates from a single seed.
pub fn eca_row_at(rule: EcaRule, seed_background: u8, steps: u64) -> EcaRow {
    let mut row = EcaRow::seed(seed_background);
    for _ in 0..steps {
        row = step_eca(rule, &row);
    }
    row
}

/// Rows `0..=steps` from a single seed.
pub fn run_eca(rule: EcaRule, seed_background: u8, steps: u64) -> Vec<EcaRow> {
    let mut rows = Vec::with_capacity(steps as usize + 1);
    rows.push(EcaRow::seed(seed_background));
    for _ in 0..steps {
        let next = step_eca(rule, rows.last().expect("nonempty"));
        rows.push(next);
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    fn render(row: &EcaRow) -> String {
        row.cells.iter().map(|s| char::from(b'0' + s)).collect()
    }

    #[test]
    fn enumeration() {
        let rules: Vec<_> = enumerate_eca().collect();
        assert_eq!(rules.len(), 256);
        assert!(rules.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(rules[0].table(), [0; 8]);
    }

    #[test]
    fn rule_204_is_identity_on_center() {
        let r = EcaRule::new(204);
        for n in 0..8u8 {
            let (l, c, rt) = ((n >> 2) & 1, (n >> 1) & 1, n & 1);
            assert_eq!(r.apply(l, c, rt), c);
        }
    }

    #[test]
    fn single_steps() {
        let seed = EcaRow::seed(0);
        assert_eq!(render(&step_eca(EcaRule::new(0), &seed)), "000");
        assert_eq!(render(&step_eca(EcaRule::new(204), &seed)), "010");
        assert_eq!(render(&step_eca(EcaRule::new(110), &seed)), "110");
    }

    #[test]
    fn runs() {
        let rows: Vec<_> = run_eca(EcaRule::new(0), 0, 2).iter().map(render).collect();
        assert_eq!(rows, ["1", "000", "00000"]);
        let rows: Vec<_> = run_eca(EcaRule::new(204), 0, 2)
            .iter()
            .map(render)
            .collect();
        assert_eq!(rows, ["1", "010", "00100"]);
        for rule in enumerate_eca() {
            assert_eq!(run_eca(rule, 1, 0).len(), 1);
            assert_eq!(run_eca(rule, 1, 0)[0].len(), 1);
        }
    }

    #[test]
    fn background_evolves_under_rule() {
        // rule 1 maps 000 -> 1, so a zero background flips to ones after one step
        let row = step_eca(EcaRule::new(1), &EcaRow::seed(0));
        assert_eq!(row.background, 1);
        assert_eq!(render(&row), "000");
    }

    #[test]
    fn light_cone_width() {
        for rule in enumerate_eca() {
            for bg in 0..2 {
                for (t, row) in run_eca(rule, bg, 12).iter().enumerate() {
                    assert_eq!(row.len(), 2 * t + 1);
                    assert_eq!(row.origin_offset, t);
                }
            }
        }
    }
}

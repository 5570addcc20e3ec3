//! Bookkeeping for the acceptance runs in `tests/acceptance.rs`.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

/// Collects one verdict per criterion and prints it as soon as it is known.
#[derive(Debug)]
pub struct Tally {
    only: BTreeSet<u32>,
    listing: bool,
    failed: Vec<u32>,
    ran: usize,
}

impl Tally {
    /// Criteria named as bare numbers in `args` are run; no numbers runs all.
    /// `--list` only names the criteria.
    pub fn from_args(args: impl IntoIterator<Item = String>) -> Self {
        let args: Vec<String> = args.into_iter().collect();
        Self {
            only: args.iter().filter_map(|a| a.parse().ok()).collect(),
            listing: args.iter().any(|a| a == "--list"),
            failed: Vec::new(),
            ran: 0,
        }
    }

    pub fn wants(&self, id: u32) -> bool {
        self.only.is_empty() || self.only.contains(&id)
    }

    /// Runs `f` if selected; it returns the verdict and a one-line detail.
    pub fn run(&mut self, id: u32, title: &str, f: impl FnOnce() -> (bool, String)) {
        if !self.wants(id) {
            return;
        }
        if self.listing {
            println!("criterion {id}: {title}");
            return;
        }
        let start = Instant::now();
        let (passed, detail) = f();
        let verdict = if passed { "PASS" } else { "FAIL" };
        println!(
            "{verdict} criterion {id:>2} {title}: {detail} [{:.1}s]",
            start.elapsed().as_secs_f64()
        );
        self.ran += 1;
        if !passed {
            self.failed.push(id);
        }
    }

    pub fn failed(&self) -> &[u32] {
        &self.failed
    }

    pub fn listing(&self) -> bool {
        self.listing
    }

    pub fn finish(self) -> ExitCode {
        if self.listing {
            return ExitCode::SUCCESS;
        }
        println!(
            "acceptance: {} run, {} passed, failed {:?}",
            self.ran,
            self.ran - self.failed.len(),
            self.failed
        );
        if self.failed.is_empty() {
            ExitCode::SUCCESS
        } else {
            ExitCode::FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selection_and_verdicts() {
        let mut t = Tally::from_args(["3".to_string(), "--nocapture".to_string(), "5".to_string()]);
        assert!(t.wants(3) && t.wants(5) && !t.wants(4));
        t.run(3, "ok", || (true, String::new()));
        t.run(4, "skipped", || unreachable!());
        t.run(5, "bad", || (false, String::new()));
        assert_eq!(t.failed(), &[5]);
        assert_eq!(t.finish(), ExitCode::FAILURE);
        let mut l = Tally::from_args(["--list".to_string()]);
        l.run(1, "named only", || unreachable!());
        assert!(l.listing() && l.failed().is_empty());
        assert_eq!(l.finish(), ExitCode::SUCCESS);
    }
}

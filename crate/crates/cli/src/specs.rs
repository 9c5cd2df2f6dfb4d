//! Builtin channel specs and file loading.

use chanent::channel::{
    depolarizing_channel, identity_channel, random_channel, random_separable_channel, swap_channel, BipartiteChannel,
};
use chanent::superchannel::{isotropic_seppsc, Superchannel};
use chanent::{measures::SolverSettings, Error, Result};

fn parse_usize(s: &str, what: &str) -> Result<usize> {
    s.parse().map_err(|_| Error::Parse(format!("{what} '{s}' is not a non-negative integer")))
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.parse().map_err(|_| Error::Parse(format!("{what} '{s}' is not a number")))
}

/// `2x2` or `2,2`.
fn parse_dims(s: &str) -> Result<Vec<usize>> {
    s.split(['x', ','])
        .map(|p| parse_usize(p, "dimension"))
        .collect()
}

fn four(s: &str) -> Result<[usize; 4]> {
    let d = parse_dims(s)?;
    d.clone()
        .try_into()
        .map_err(|_| Error::Parse(format!("expected four dimensions A0xB0xA1xB1, got {d:?}")))
}

fn two(s: &str) -> Result<(usize, usize)> {
    match parse_dims(s)?.as_slice() {
        [a, b] => Ok((*a, *b)),
        d => Err(Error::Parse(format!("expected two dimensions AxB, got {d:?}"))),
    }
}

/// Parse a channel spec:
///
/// * `swap:K` (also `swapK`)
/// * `identity:AxB`
/// * `depolarizing:AxB:p`
/// * `random:A0xB0xA1xB1:seed`
/// * `sep-random:A0xB0xA1xB1:seed:terms`
///
/// Anything else is read as a channel JSON file.
pub fn channel(spec: &str) -> Result<BipartiteChannel> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["swap", k] => swap_channel(parse_usize(k, "swap size")?),
        [s] if s.starts_with("swap") && s[4..].parse::<usize>().is_ok() => swap_channel(parse_usize(&s[4..], "swap size")?),
        ["identity", d] => {
            let (a, b) = two(d)?;
            identity_channel(a, b)
        }
        ["depolarizing", d, p] => {
            let (a, b) = two(d)?;
            depolarizing_channel(a, b, parse_f64(p, "depolarizing parameter")?)
        }
        ["random", d, seed] => random_channel(four(d)?, parse_usize(seed, "seed")? as u64),
        ["sep-random", d, seed, terms] => {
            random_separable_channel(four(d)?, parse_usize(seed, "seed")? as u64, parse_usize(terms, "term count")?)
        }
        _ => {
            let text = std::fs::read_to_string(spec)
                .map_err(|e| Error::Parse(format!("'{spec}' is neither a builtin channel spec nor a readable file: {e}")))?;
            BipartiteChannel::from_json(&text)
        }
    }
}

/// Parse a superchannel spec: `isotropic:K:w` or a superchannel JSON file.
pub fn superchannel(spec: &str, settings: &SolverSettings) -> Result<Superchannel> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["isotropic", k, w] => {
            Ok(isotropic_seppsc(parse_usize(k, "swap size")?, parse_f64(w, "weight")?, settings)?.superchannel)
        }
        _ => {
            let text = std::fs::read_to_string(spec).map_err(|e| {
                Error::Parse(format!("'{spec}' is neither a builtin superchannel spec nor a readable file: {e}"))
            })?;
            Superchannel::from_json(&text)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_specs() {
        assert_eq!(channel("swap:2").unwrap().dims(), [2, 2, 2, 2]);
        assert_eq!(channel("swap3").unwrap().dims(), [3, 3, 3, 3]);
        assert_eq!(channel("identity:2x1").unwrap().dims(), [2, 1, 2, 1]);
        assert_eq!(channel("depolarizing:2x2:0.5").unwrap().dims(), [2, 2, 2, 2]);
        assert_eq!(channel("random:2x1x1x2:4").unwrap().dims(), [2, 1, 1, 2]);
        assert!(channel("sep-random:2x2x2x2:1:3").unwrap().is_certified_separable());
        assert!(matches!(channel("random:2x2:1"), Err(Error::Parse(_))));
        assert!(matches!(channel("no/such/file.json"), Err(Error::Parse(_))));
    }
}

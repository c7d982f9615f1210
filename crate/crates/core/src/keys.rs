//! The interactive key set: `P F C S L V R`, case-insensitive.

use thiserror::Error;

use crate::eventlog::{Payload, Target};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown key {key:?} at position {position}")]
pub struct KeyError {
    pub key: char,
    pub position: usize,
}

/// Maps one key to its event. `R` prunes at `threshold`.
pub fn key_event(key: char, threshold: u64) -> Option<Payload> {
    Some(match key.to_ascii_uppercase() {
        'P' => Payload::AddPost,
        'F' => Payload::AddFriend,
        'C' => Payload::AddComment { post: Target::Random },
        'S' => Payload::AddShare { post: Target::Random },
        'L' => Payload::LikeAll,
        'V' => Payload::ViewAll,
        'R' => Payload::Prune { threshold },
        _ => return None,
    })
}

/// Maps a key script to events. Whitespace is skipped; any other unknown
/// character is an error carrying its character position.
pub fn parse_script(script: &str, threshold: u64) -> Result<Vec<Payload>, KeyError> {
    script
        .chars()
        .enumerate()
        .filter(|(_, c)| !c.is_whitespace())
        .map(|(position, key)| key_event(key, threshold).ok_or(KeyError { key, position }))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_keys() {
        let events = parse_script("PFCSLVR", 50).unwrap();
        assert_eq!(
            events,
            vec![
                Payload::AddPost,
                Payload::AddFriend,
                Payload::AddComment { post: Target::Random },
                Payload::AddShare { post: Target::Random },
                Payload::LikeAll,
                Payload::ViewAll,
                Payload::Prune { threshold: 50 },
            ]
        );
        assert_eq!(parse_script("pfcslvr", 50).unwrap(), events);
    }

    #[test]
    fn whitespace_and_unknown() {
        assert_eq!(parse_script(" P\nF ", 9).unwrap().len(), 2);
        assert_eq!(parse_script("PPX", 50), Err(KeyError { key: 'X', position: 2 }));
        assert_eq!(parse_script("", 50).unwrap(), vec![]);
        assert_eq!(key_event('r', 7), Some(Payload::Prune { threshold: 7 }));
    }
}

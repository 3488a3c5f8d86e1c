use std::collections::HashMap;

use chrono::{DateTime, Duration, Utc};
use parking_lot::Mutex;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Session {
    pub token: String,
    pub user: String,
    pub created_at: DateTime<Utc>,
    pub expires_at: DateTime<Utc>,
}

/// In-memory bearer sessions with a fixed lifetime.
pub struct Sessions {
    ttl: Duration,
    by_token: Mutex<HashMap<String, Session>>,
}

impl Sessions {
    pub fn new(ttl: Duration) -> Self {
        Sessions {
            ttl,
            by_token: Mutex::new(HashMap::new()),
        }
    }

    pub fn create(&self, user: &str) -> Session {
        let mut bytes = [0u8; 32];
        rand::fill(&mut bytes);
        let now = Utc::now();
        let session = Session {
            token: hex::encode(bytes),
            user: user.to_owned(),
            created_at: now,
            expires_at: now + self.ttl,
        };
        let mut map = self.by_token.lock();
        map.retain(|_, s| s.expires_at > now);
        map.insert(session.token.clone(), session.clone());
        session
    }

    /// The live session for `token`; expired sessions are dropped.
    pub fn get(&self, token: &str) -> Option<Session> {
        let mut map = self.by_token.lock();
        match map.get(token) {
            Some(s) if s.expires_at > Utc::now() => Some(s.clone()),
            Some(_) => {
                map.remove(token);
                None
            }
            None => None,
        }
    }
}

//! Per-session filter state with idle expiry.

use std::collections::HashMap;
use std::sync::{Arc, Mutex as StdMutex};
use std::time::{Duration, Instant, SystemTime};

use tokio::sync::Mutex;
use topiclens::FilterState;

#[derive(Debug)]
pub struct Session {
    pub id: String,
    pub state: FilterState,
    pub created_at: SystemTime,
    last_access: Instant,
}

/// Sessions keyed by id. Each session sits behind its own async mutex, so
/// requests against one session run one at a time in arrival order while
/// different sessions proceed independently.
#[derive(Debug)]
pub struct SessionStore {
    ttl: Duration,
    sessions: StdMutex<HashMap<String, Arc<Mutex<Session>>>>,
}

impl SessionStore {
    pub fn new(ttl: Duration) -> Self {
        Self { ttl, sessions: StdMutex::new(HashMap::new()) }
    }

    pub fn create(&self) -> String {
        let id = uuid::Uuid::new_v4().simple().to_string();
        let now = Instant::now();
        let session =
            Session { id: id.clone(), state: FilterState::default(), created_at: SystemTime::now(), last_access: now };
        let mut sessions = self.sessions.lock().expect("session map poisoned");
        Self::evict(&mut sessions, self.ttl, now);
        sessions.insert(id.clone(), Arc::new(Mutex::new(session)));
        id
    }

    /// Looks up a live session. Expired sessions are dropped on the way.
    pub async fn get(&self, id: &str) -> Option<Arc<Mutex<Session>>> {
        let now = Instant::now();
        let handle = {
            let mut sessions = self.sessions.lock().expect("session map poisoned");
            Self::evict(&mut sessions, self.ttl, now);
            sessions.get(id).cloned()
        }?;
        handle.lock().await.last_access = now;
        Some(handle)
    }

    pub fn len(&self) -> usize {
        self.sessions.lock().expect("session map poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn evict(sessions: &mut HashMap<String, Arc<Mutex<Session>>>, ttl: Duration, now: Instant) {
        sessions.retain(|_, s| match s.try_lock() {
            Ok(s) => now.duration_since(s.last_access) < ttl,
            // In use right now, so not idle.
            Err(_) => true,
        });
    }
}

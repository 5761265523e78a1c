use std::sync::{Arc, Mutex, OnceLock};

/// Write-once memo table indexed by level.
pub struct LazySeq<T>(Mutex<Vec<Arc<OnceLock<T>>>>);

impl<T: Clone> LazySeq<T> {
    pub fn new() -> Arc<LazySeq<T>> {
        Arc::new(LazySeq(Mutex::new(Vec::new())))
    }

    pub fn get(&self, n: usize, init: impl FnOnce() -> T) -> T {
        let cell = {
            let mut v = self.0.lock().expect("memo table");
            while v.len() <= n {
                v.push(Arc::new(OnceLock::new()));
            }
            v[n].clone()
        };
        cell.get_or_init(init).clone()
    }
}

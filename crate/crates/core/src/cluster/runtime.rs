use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use super::config::ClusterConfig;
use super::ledger::{CostLedger, StageCost};
use crate::error::{Error, Result};

/// Bytes moved into a stage, recorded before it runs.
#[derive(Clone, Debug)]
pub struct Shipment {
    received: Vec<u64>,
    sent: Vec<u64>,
}

impl Shipment {
    pub fn new(k: usize) -> Self {
        Shipment {
            received: vec![0; k],
            sent: vec![0; k + 1],
        }
    }

    /// Bytes read by `to` from storage or handed out by the driver.
    pub fn from_storage(&mut self, to: usize, bytes: u64) {
        let k = self.received.len();
        self.sent[k] += bytes;
        self.received[to] += bytes;
    }

    /// Bytes shuffled from one worker to another. Local hand-offs are free.
    pub fn between(&mut self, from: usize, to: usize, bytes: u64) {
        if from != to {
            self.sent[from] += bytes;
            self.received[to] += bytes;
        }
    }

    /// Shuffle traffic: counted even when source and target coincide,
    /// since it goes through the exchange either way.
    pub fn shuffle(&mut self, from: usize, to: usize, bytes: u64) {
        self.sent[from] += bytes;
        self.received[to] += bytes;
    }

    pub fn received(&self, worker: usize) -> u64 {
        self.received[worker]
    }
}

/// Per-task handle used to report work.
#[derive(Debug)]
pub struct WorkerCtx {
    worker: usize,
    work: u64,
}

impl WorkerCtx {
    pub fn worker(&self) -> usize {
        self.worker
    }

    pub fn add_work(&mut self, units: u64) {
        self.work += units;
    }
}

/// Payload registered for broadcast; see [`Cluster::use_broadcast`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BroadcastHandle {
    id: usize,
    bytes: u64,
}

impl BroadcastHandle {
    pub fn bytes(&self) -> u64 {
        self.bytes
    }
}

#[derive(Debug)]
struct BroadcastState {
    bytes: u64,
    cached_at: Vec<bool>,
}

/// The simulated cluster: `k` workers, a cost ledger, broadcast caches.
pub struct Cluster {
    config: ClusterConfig,
    ledger: CostLedger,
    broadcasts: Vec<BroadcastState>,
    #[cfg(feature = "parallel")]
    pool: Option<rayon::ThreadPool>,
}

impl std::fmt::Debug for Cluster {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Cluster")
            .field("config", &self.config)
            .field("stages", &self.ledger.stages().len())
            .finish()
    }
}

impl Cluster {
    pub fn new(config: ClusterConfig) -> Result<Self> {
        config.validate()?;
        #[cfg(feature = "parallel")]
        let pool = match config.physical_threads() {
            1 => None,
            t => Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(t)
                    .build()
                    .map_err(|e| Error::Config(format!("thread pool: {e}")))?,
            ),
        };
        Ok(Cluster {
            config,
            ledger: CostLedger::new(),
            broadcasts: Vec::new(),
            #[cfg(feature = "parallel")]
            pool,
        })
    }

    pub fn k(&self) -> usize {
        self.config.k
    }

    pub fn config(&self) -> &ClusterConfig {
        &self.config
    }

    pub fn ledger(&self) -> &CostLedger {
        &self.ledger
    }

    pub fn into_ledger(self) -> CostLedger {
        self.ledger
    }

    pub fn shipment(&self) -> Shipment {
        Shipment::new(self.config.k)
    }

    /// Register a payload of `bytes` for broadcast. Nothing is charged
    /// until a worker uses it.
    pub fn broadcast(&mut self, bytes: u64) -> BroadcastHandle {
        let id = self.broadcasts.len();
        self.broadcasts.push(BroadcastState {
            bytes,
            cached_at: vec![false; self.config.k],
        });
        BroadcastHandle { id, bytes }
    }

    /// Charge `worker` for reading a broadcast payload. A payload that fits
    /// the memory budget is charged once per worker and cached; one that
    /// does not is streamed again on every use.
    pub fn use_broadcast(&mut self, handle: BroadcastHandle, ship: &mut Shipment, worker: usize) {
        let fits = self.config.fits(handle.bytes);
        let state = &mut self.broadcasts[handle.id];
        if fits && state.cached_at[worker] {
            return;
        }
        ship.from_storage(worker, state.bytes);
        if fits {
            state.cached_at[worker] = true;
        }
    }

    pub fn is_cached(&self, handle: BroadcastHandle, worker: usize) -> bool {
        self.broadcasts[handle.id].cached_at[worker]
    }

    /// Run one task per input on workers `0..inputs.len()`, then commit the
    /// stage's costs. Outputs come back in worker order whatever the
    /// thread scheduling was. A panicking task fails the whole stage.
    pub fn run_stage<I, T, F>(
        &mut self,
        name: &str,
        ship: Shipment,
        inputs: Vec<I>,
        task: F,
    ) -> Result<Vec<T>>
    where
        I: Send,
        T: Send,
        F: Fn(&mut WorkerCtx, I) -> T + Sync,
    {
        let k = self.config.k;
        if inputs.len() > k {
            return Err(Error::Contract(format!(
                "stage {name}: {} tasks for {k} workers",
                inputs.len()
            )));
        }
        let started = Instant::now();
        let run = |(worker, input): (usize, I)| {
            let mut ctx = WorkerCtx { worker, work: 0 };
            let out = catch_unwind(AssertUnwindSafe(|| task(&mut ctx, input)));
            (worker, out.map(|t| (t, ctx.work)))
        };
        #[cfg(feature = "parallel")]
        let results: Vec<_> = match &self.pool {
            Some(pool) => pool.install(|| inputs.into_par_iter().enumerate().map(run).collect()),
            None => inputs.into_iter().enumerate().map(run).collect(),
        };
        #[cfg(not(feature = "parallel"))]
        let results: Vec<_> = inputs.into_iter().enumerate().map(run).collect();

        let mut work_units = vec![0; k];
        let mut outputs = Vec::with_capacity(results.len());
        for (worker, result) in results {
            match result {
                Ok((out, work)) => {
                    work_units[worker] = work;
                    outputs.push(out);
                }
                Err(payload) => {
                    return Err(Error::Stage {
                        stage: name.to_owned(),
                        worker,
                        message: panic_message(payload.as_ref()),
                    })
                }
            }
        }
        self.ledger.commit(StageCost {
            name: name.to_owned(),
            k,
            bytes_received: ship.received,
            bytes_sent: ship.sent,
            work_units,
            wall_ms: started.elapsed().as_secs_f64() * 1e3,
        });
        Ok(outputs)
    }
}

fn panic_message(payload: &(dyn std::any::Any + Send)) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        (*s).to_owned()
    } else if let Some(s) = payload.downcast_ref::<String>() {
        s.clone()
    } else {
        "worker task panicked".to_owned()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cluster(k: usize) -> Cluster {
        Cluster::new(ClusterConfig::new(k).unwrap()).unwrap()
    }

    #[test]
    fn outputs_in_worker_order_and_work_metered() {
        let mut c = cluster(4);
        let out = c
            .run_stage("count", c.shipment(), vec![3u64, 1, 4, 1], |ctx, x| {
                ctx.add_work(x);
                ctx.worker() as u64 * 10 + x
            })
            .unwrap();
        assert_eq!(out, vec![3, 11, 24, 31]);
        let stage = &c.ledger().stages()[0];
        assert_eq!(stage.y_units(), 4);
        assert_eq!(stage.total_units(), 9);
    }

    #[test]
    fn empty_stage_costs_nothing() {
        let mut c = cluster(3);
        let out: Vec<()> = c.run_stage("noop", c.shipment(), Vec::<()>::new(), |_, _| ()).unwrap();
        assert!(out.is_empty());
        assert_eq!(c.ledger().total_bytes(), 0);
        assert_eq!(c.ledger().total_units(), 0);
    }

    #[test]
    fn panic_names_worker() {
        let mut c = cluster(3);
        let err = c
            .run_stage("boom", c.shipment(), vec![0, 1, 2], |_, x| {
                if x == 2 {
                    panic!("bad input");
                }
                x
            })
            .unwrap_err();
        match err {
            Error::Stage { stage, worker, message } => {
                assert_eq!(stage, "boom");
                assert_eq!(worker, 2);
                assert!(message.contains("bad input"));
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn broadcast_charged_once_unless_spilling() {
        let mut c = cluster(2);
        let h = c.broadcast(100);
        for _ in 0..3 {
            let mut ship = c.shipment();
            c.use_broadcast(h, &mut ship, 0);
            c.use_broadcast(h, &mut ship, 1);
            c.run_stage("level", ship, vec![(), ()], |_, _| ()).unwrap();
        }
        assert_eq!(c.ledger().total_bytes(), 200);

        let mut c = Cluster::new(ClusterConfig::new(1).unwrap().with_budget(50)).unwrap();
        let h = c.broadcast(100);
        for _ in 0..3 {
            let mut ship = c.shipment();
            c.use_broadcast(h, &mut ship, 0);
            c.run_stage("level", ship, vec![()], |_, _| ()).unwrap();
        }
        assert_eq!(c.ledger().total_bytes(), 300);
    }

    #[test]
    fn shipment_conserves_bytes() {
        let mut s = Shipment::new(3);
        s.from_storage(0, 10);
        s.between(0, 2, 7);
        s.between(1, 1, 99);
        assert_eq!(s.received.iter().sum::<u64>(), s.sent.iter().sum::<u64>());
    }
}

// SPDX-License-Identifier: Apache-2.0

//! Child processes in their own process group, killed as a group on timeout
//! or interrupt.

use std::io::Read;
use std::os::unix::process::CommandExt;
use std::path::Path;
use std::process::{Command, Stdio};
use std::sync::atomic::{AtomicI32, Ordering};
use std::thread;
use std::time::{Duration, Instant};

const SLOTS: usize = 512;

#[allow(clippy::declare_interior_mutable_const)]
const EMPTY: AtomicI32 = AtomicI32::new(0);
static RUNNING: [AtomicI32; SLOTS] = [EMPTY; SLOTS];

fn register(pgid: i32) -> Option<usize> {
    (0..SLOTS).find(|&i| {
        RUNNING[i]
            .compare_exchange(0, pgid, Ordering::SeqCst, Ordering::SeqCst)
            .is_ok()
    })
}

fn unregister(slot: Option<usize>) {
    if let Some(i) = slot {
        RUNNING[i].store(0, Ordering::SeqCst);
    }
}

/// Kills every process group started by [`run_process`] that is still
/// running. Only uses async-signal-safe calls.
pub fn kill_running() {
    for slot in &RUNNING {
        let pgid = slot.load(Ordering::SeqCst);
        if pgid > 0 {
            // SAFETY: killpg has no memory-safety preconditions.
            unsafe {
                libc::killpg(pgid, libc::SIGKILL);
            }
        }
    }
}

extern "C" fn on_interrupt(sig: libc::c_int) {
    kill_running();
    // SAFETY: _exit is async-signal-safe and never returns.
    unsafe { libc::_exit(128 + sig) }
}

/// Makes SIGINT and SIGTERM kill running solver processes before exiting.
pub fn install_interrupt_handler() {
    let handler = on_interrupt as extern "C" fn(libc::c_int) as libc::sighandler_t;
    // SAFETY: the handler only touches atomics and async-signal-safe calls.
    unsafe {
        libc::signal(libc::SIGINT, handler);
        libc::signal(libc::SIGTERM, handler);
    }
}

#[derive(Clone, Debug)]
pub(crate) struct ProcessOutput {
    pub stdout: String,
    pub stderr: String,
    /// `None` when terminated by a signal.
    pub exit_code: Option<i32>,
    pub timed_out: bool,
    pub elapsed: Duration,
}

fn drain(mut r: impl Read + Send + 'static) -> thread::JoinHandle<Vec<u8>> {
    thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = r.read_to_end(&mut buf);
        buf
    })
}

pub(crate) fn run_process(
    binary: &Path,
    args: &[String],
    timeout: Duration,
) -> std::io::Result<ProcessOutput> {
    let start = Instant::now();
    let mut child = Command::new(binary)
        .args(args)
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .process_group(0)
        .spawn()?;
    let pgid = child.id() as i32;
    let slot = register(pgid);
    let out = drain(child.stdout.take().expect("piped"));
    let err = drain(child.stderr.take().expect("piped"));

    let mut pause = Duration::from_micros(200);
    let (status, timed_out) = loop {
        if let Some(status) = child.try_wait()? {
            break (status, false);
        }
        if start.elapsed() >= timeout {
            // SAFETY: see kill_running.
            unsafe {
                libc::killpg(pgid, libc::SIGKILL);
            }
            break (child.wait()?, true);
        }
        let left = timeout.saturating_sub(start.elapsed());
        thread::sleep(pause.min(left).max(Duration::from_micros(50)));
        pause = (pause * 2).min(Duration::from_millis(10));
    };
    let elapsed = start.elapsed();
    // Reap stray grandchildren that still hold the pipes open.
    // SAFETY: see kill_running.
    unsafe {
        libc::killpg(pgid, libc::SIGKILL);
    }
    unregister(slot);
    let stdout = out.join().unwrap_or_default();
    let stderr = err.join().unwrap_or_default();
    Ok(ProcessOutput {
        stdout: String::from_utf8_lossy(&stdout).into_owned(),
        stderr: String::from_utf8_lossy(&stderr).into_owned(),
        exit_code: status.code(),
        timed_out,
        elapsed,
    })
}

//! Two producer threads publish into the latest-value channel while the
//! arbiter ticks at its own rate. The wearer branch overrides for a while,
//! then goes quiet; the executed stream switches cleanly each time.

use std::thread;
use std::time::{Duration, Instant};

use crossview_guide::arbiter::{ArbiterConfig, CommandChannel, Selection};
use crossview_guide::planner::{CommandSource, VelocityCommand};

fn main() {
    let cfg = ArbiterConfig::default();
    let channel = CommandChannel::new();
    let start = Instant::now();
    let now = move || start.elapsed().as_secs_f64();

    let planner = {
        let ch = channel.clone();
        thread::spawn(move || {
            while now() < 1.2 {
                ch.publish(VelocityCommand::new(0.5, 0.0, 0.05, now(), CommandSource::Apf));
                thread::sleep(Duration::from_millis(100));
            }
        })
    };
    let wearer = {
        let ch = channel.clone();
        thread::spawn(move || {
            while now() < 1.2 {
                let t = now();
                // Evade between 0.3 s and 0.7 s, otherwise publish exact zeros.
                let cmd = if (0.3..0.7).contains(&t) {
                    VelocityCommand::new(0.2, 0.0, -0.8, t, CommandSource::Human)
                } else {
                    VelocityCommand::zero(CommandSource::Human, t)
                };
                ch.publish(cmd);
                thread::sleep(Duration::from_millis(66));
            }
        })
    };

    let mut last = None;
    while now() < 1.3 {
        let d = channel.tick(now(), &cfg);
        if last != Some(d.selection) {
            let c = d.selected;
            println!("t={:.2}s A={} -> {:<5} v_x={:.2} w_z={:+.2}", d.stamp, u8::from(d.a), d.selection.as_str(), c.v_x, c.w_z);
            last = Some(d.selection);
        }
        thread::sleep(Duration::from_millis(50));
    }
    planner.join().unwrap();
    wearer.join().unwrap();
    // Both producers are gone, so the streams go stale and the arbiter stops.
    let d = channel.tick(now() + 1.0, &cfg);
    assert_eq!(d.selection, Selection::Stop);
    println!("after both streams go stale: {}", d.selection.as_str());
}

//! Uses the event engine on its own with a made-up event vocabulary: a
//! ticking clock and a queue of customers served by one clerk.

use lloyds_sim::des::{Context, Engine, Process, RngStreams, SimEvent, SimTime};
use rand::Rng;

#[derive(Clone, Debug)]
enum Ev {
    Arrive(u32),
    Done(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Kind {
    Arrive,
    Done,
}

impl SimEvent for Ev {
    type Kind = Kind;

    fn kind(&self) -> Kind {
        match self {
            Ev::Arrive(_) => Kind::Arrive,
            Ev::Done(_) => Kind::Done,
        }
    }

    fn tier(&self) -> u8 {
        // Finish a job before taking the next arrival on the same day.
        match self {
            Ev::Done(_) => 0,
            Ev::Arrive(_) => 1,
        }
    }

    fn summary(&self) -> String {
        format!("{self:?}")
    }
}

struct Clerk {
    queue: Vec<u32>,
    busy: bool,
    served: u32,
    last: Option<u32>,
    rng: lloyds_sim::des::SimRng,
}

impl Process<Ev> for Clerk {
    fn subscriptions(&self) -> Vec<Kind> {
        vec![Kind::Arrive, Kind::Done]
    }

    fn handle(&mut self, event: &Ev, ctx: &mut Context<'_, Ev>) {
        match event {
            Ev::Arrive(id) => {
                self.queue.push(*id);
                let next = ctx.now().plus_days(self.rng.random_range(1..4));
                ctx.schedule_at(next, Ev::Arrive(id + 1));
            }
            Ev::Done(id) => {
                self.busy = false;
                self.served += 1;
                self.last = Some(*id);
            }
        }
        if !self.busy && !self.queue.is_empty() {
            let id = self.queue.remove(0);
            self.busy = true;
            ctx.schedule_in(self.rng.random_range(1..3), Ev::Done(id));
        }
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let streams = RngStreams::new(5);
    let mut engine = Engine::new();
    engine.enable_trace();
    let clerk = engine.add_process(Clerk {
        queue: Vec::new(),
        busy: false,
        served: 0,
        last: None,
        rng: streams.stream("clerk"),
    });
    engine.schedule(SimTime::ZERO, Ev::Arrive(0))?;
    let stats = engine.run_until(SimTime::from_day(30))?;

    for rec in engine.trace().unwrap_or_default().iter().take(12) {
        println!("{}", rec.to_line());
    }
    let c: &Clerk = engine.process(clerk).expect("clerk stays registered");
    println!(
        "served {} customers (last id {:?}), {} still waiting, {} events",
        c.served,
        c.last,
        c.queue.len(),
        stats.dispatched
    );
    Ok(())
}

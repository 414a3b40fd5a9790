//! A one-bit store driven by read and write gliders in one continuing
//! simulation.

use super::{GateBlueprint, GateError, GateName, Sim};

/// Live state of a memory blueprint. Each operation launches one glider on
/// the next step its window allows and runs to that launch's readout.
pub struct MemoryCell<'a> {
    sim: Sim<'a>,
    read: usize,
    write: usize,
    bit: usize,
    token: usize,
    probe: usize,
}

impl<'a> MemoryCell<'a> {
    /// The blueprint's fixtures at step 0: bit clear, token in place.
    pub fn new(bp: &'a GateBlueprint) -> Result<MemoryCell<'a>, GateError> {
        let missing = |what: &str| GateError::Protocol(format!("memory blueprint lacks port {what}"));
        if bp.name != GateName::Memory {
            return Err(GateError::NotMemory(bp.name));
        }
        Ok(MemoryCell {
            read: bp.input("read").ok_or_else(|| missing("read"))?,
            write: bp.input("write").ok_or_else(|| missing("write"))?,
            bit: bp.output("bit").ok_or_else(|| missing("bit"))?,
            token: bp.output("token").ok_or_else(|| missing("token"))?,
            probe: bp.output("probe").ok_or_else(|| missing("probe"))?,
            sim: Sim::new(bp)?,
        })
    }

    /// Current step of the simulation.
    pub fn time(&self) -> usize {
        self.sim.time
    }

    pub fn grid(&self) -> &crate::lattice::Grid {
        &self.sim.grid
    }

    /// Lets the configuration run `steps` steps with no launches.
    pub fn wait(&mut self, steps: usize) -> Result<(), GateError> {
        self.sim.advance_to(self.sim.time + steps)
    }

    /// True if an o1 sits on the bit site now.
    pub fn bit(&mut self) -> Result<bool, GateError> {
        let seen = self.sim.readout()?;
        // Stationary ports are stored for the readout step; the o1 box is
        // the same in both phases, so any step will do.
        let port = &self.sim.bp.outputs[self.bit];
        Ok(self.sim.present(&seen, &port.shape, (0, 0), port.region))
    }

    /// Sends a write glider. The bit must be clear.
    pub fn write(&mut self) -> Result<(), GateError> {
        if self.bit()? {
            return Err(GateError::BitAlreadySet);
        }
        let [bit] = self.run(self.write, [self.bit])?;
        if !bit {
            return Err(GateError::Protocol("write glider did not restore the bit".into()));
        }
        Ok(())
    }

    /// Sends a read glider and reports the bit. Reading erases it: a stored
    /// one stops the glider and leaves the token; a clear bit lets the glider
    /// through.
    pub fn read(&mut self) -> Result<bool, GateError> {
        let [passed, token, bit] = self.run(self.read, [self.probe, self.token, self.bit])?;
        if bit {
            return Err(GateError::Protocol("bit still set after a read".into()));
        }
        if !passed && !token {
            return Err(GateError::Protocol("read glider stopped but no token formed".into()));
        }
        Ok(!passed)
    }

    /// Launches `input` at its next allowed step and reports `outputs` at
    /// the readout.
    fn run<const N: usize>(&mut self, input: usize, outputs: [usize; N]) -> Result<[bool; N], GateError> {
        let bp = self.sim.bp;
        let window = bp.window.max(1);
        let port = &bp.inputs[input];
        let mut launch = self.sim.time;
        while launch % window != port.launch % window {
            launch += 1;
        }
        self.sim.advance_to(launch)?;
        self.sim.inject(port)?;
        self.sim.advance_to(launch + bp.timing)?;
        let seen = self.sim.readout()?;
        let mut out = [false; N];
        for (slot, &o) in out.iter_mut().zip(&outputs) {
            let p = &bp.outputs[o];
            *slot = self.sim.present(&seen, &p.shape, p.velocity, p.region);
        }
        Ok(out)
    }
}

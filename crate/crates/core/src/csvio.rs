use std::io::Write;

/// CSV writer with `\n` line endings so outputs are identical across platforms.
pub(crate) fn csv_writer<W: Write>(sink: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink)
}

import logging

from src.commands import asymmetry, era, fpt, ingest, leverage, report, sweep, synth
from src.repository.reports import ReportWriter
from src.schemas import Command, RunConfig

logger = logging.getLogger(__name__)

HANDLERS = {
    Command.ingest: ingest.handle,
    Command.synth: synth.handle,
    Command.fpt: fpt.handle,
    Command.sweep: sweep.handle,
    Command.asymmetry: asymmetry.handle,
    Command.leverage: leverage.handle,
    Command.era: era.handle,
    Command.report: report.handle,
}

COMMAND_MODULES = (ingest, synth, fpt, sweep, asymmetry, leverage, era, report)


def run(config: RunConfig) -> int:
    """Runs one command and records the manifest; errors propagate to the caller."""
    logger.info("Running %s with %d input(s), %d worker(s)", config.command.value, len(config.inputs), config.workers)
    writer = ReportWriter(config.output_dir, config.output_format)
    HANDLERS[config.command](config, writer)
    writer.manifest(config, config.inputs)
    return 0

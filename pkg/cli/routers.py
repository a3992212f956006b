import click

from .check import check
from .davies import davies
from .simulate import simulate
from .analyze import analyze
from .sweep import sweep


@click.group()
def lab():
    """Open-system lab: Davies generators, exact finite-bath dynamics and correlation analysis."""


lab.add_command(check)
lab.add_command(davies)
lab.add_command(simulate)
lab.add_command(analyze)
lab.add_command(sweep)

__all__ = ["lab"]

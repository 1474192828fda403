from typing import Annotated

import typer
from typer.core import TyperGroup

from blowuplab.utils import get_version

from .beta import beta as beta_func
from .cn import cn_asym as cn_asym_func
from .cn import cn_root as cn_root_func
from .cn import cn_scan as cn_scan_func
from .critical import critical_point as critical_point_func
from .energy import energy as energy_func
from .energy import expansion as expansion_func
from .energy import residual_norms as residual_norms_func
from .verify import verify_bubble as verify_bubble_func
from .verify import verify_kernel as verify_kernel_func


# typer re-exports BadParameter but not its base; newer typer releases vendor
# click, so the base has to come from typer rather than from click itself.
_UsageError = typer.BadParameter.__base__


class _Group(TyperGroup):
    # Exit code 2 is reserved for numerical failures.
    def make_context(self, info_name, args, parent=None, **extra):
        try:
            return super().make_context(info_name, args, parent=parent, **extra)
        except _UsageError as exc:
            exc.exit_code = 1
            raise

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except _UsageError as exc:
            exc.exit_code = 1
            raise


app = typer.Typer(cls=_Group)
app.command(name="beta")(beta_func)
app.command(name="cn-scan")(cn_scan_func)
app.command(name="cn-root")(cn_root_func)
app.command(name="cn-asym")(cn_asym_func)
app.command(name="verify-bubble")(verify_bubble_func)
app.command(name="verify-kernel")(verify_kernel_func)
app.command(name="energy")(energy_func)
app.command(name="expansion")(expansion_func)
app.command(name="residual-norms")(residual_norms_func)
app.command(name="critical-point")(critical_point_func)


def _version_callback(value: bool):
    if value:
        print(get_version())
        raise typer.Exit()


@app.callback()
def callback(
    version: Annotated[
        bool | None,
        typer.Option(
            "--version",
            callback=_version_callback,
        ),
    ] = None,
):
    """
    Numerical checks for boundary blow-up under doubly critical Neumann conditions.
    """

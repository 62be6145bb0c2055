from rich.console import Console
from rich.panel import Panel
from rich.table import Table
from rich.text import Text

console = Console()
err_console = Console(stderr=True)


def show_success(message):
    '''Show success message in green'''
    console.print(f"  ✅ {message}", style="bold green")

def show_error(message):
    '''Show error message in red (stderr)'''
    err_console.print(f"  ❌ {message}", style="bold red")

def show_warning(message):
    '''Show warning message in yellow'''
    console.print(f"  ⚠️  {message}", style="yellow")

def show_info(message):
    '''Show info message in blue'''
    console.print(f"  ℹ️  {message}", style="bold blue")

def header_text(version="v1.0"):
    '''QMARGIN banner'''
    logo = Text()
    logo.append("  QMARGIN", style="bold cyan")
    logo.append(f"  {version}", style="bold white")
    logo.append("  |  Two-state discrimination with an error margin", style="dim")
    return logo

def print_header():
    console.print(Panel(header_text(), border_style="cyan", padding=(0, 2)))

def show_step(message, status="done"):
    '''Show a progress step with vertical connecting line.
    status: "done", "active", "error"
    '''
    icons = {"done": "✅", "active": "⏳", "error": "❌"}
    styles = {"done": "bold green", "active": "bold cyan", "error": "bold red"}
    console.print("  │", style="dim cyan")
    console.print(f"  ├── {icons.get(status, '•')} {message}", style=styles.get(status, "white"))

def show_step_final(message, success=True):
    '''Show the final step (uses end connector)'''
    console.print("  │", style="dim cyan")
    if success:
        console.print(f"  └── ✅ {message}", style="bold green")
    else:
        console.print(f"  └── ❌ {message}", style="bold red")

def show_step_detail(message):
    '''Detail line under a step, keeping the vertical line'''
    console.print(f"  │     {message}", style="dim green")

def show_result_panel(content, title="Result", success=True):
    '''Show result info in a styled panel'''
    color = "green" if success else "red"
    panel = Panel(
        content,
        title=f"[bold {color}]{title}[/bold {color}]",
        border_style=color,
        padding=(1, 2)
    )
    console.print()
    console.print(panel)

def key_value_table(rows, title=None):
    '''Two-column table of (label, value) pairs'''
    table = Table(title=title, show_header=False, box=None, padding=(0, 2))
    table.add_column("key", style="cyan", no_wrap=True)
    table.add_column("value", style="white")
    for key, value in rows:
        table.add_row(key, value)
    return table

def fmt(value, digits=12):
    '''Number formatting for reports; None prints as "undefined".'''
    if value is None:
        return "undefined"
    if isinstance(value, float):
        return f"{value:.{digits}g}"
    return str(value)

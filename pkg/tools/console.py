import sys
import datetime
import traceback
from pathlib import Path


class Console:
    def __init__(self, log_path=None, stream=None):
        self.stream = stream if stream is not None else sys.stderr
        if log_path is not None:
            log_path = Path(log_path)
            log_path.mkdir(parents=True, exist_ok=True)
            self.log_file = log_path / "console_log.txt"
            self.error_file = log_path / "error_log.txt"
        else:
            self.log_file = None
            self.error_file = None

        # Redirect unhandled exceptions to custom error handler
        sys.excepthook = self.handle_exception

    def log(self, *args, log_type="log"):
        timestamp = datetime.datetime.now().strftime("%Y-%m-%d %H:%M:%S")
        message = " ".join(str(arg) for arg in args)
        formatted_message = f"[{timestamp}] {message}"
        print(formatted_message, file=self.stream)
        target = self.error_file if log_type == "error" else self.log_file
        if target is not None:
            with open(target, "a") as f:
                f.write(formatted_message + "\n")

    def warning(self, *args):
        self.log("WARNING:", *args, log_type="warning")

    def error(self, *args):
        self.log("ERROR:", *args, log_type="error")

    def info(self, *args):
        self.log("INFO:", *args)

    def report(self, **fields):
        # machine readable, always on stdout
        line = " ".join(f"{key}={value}" for key, value in fields.items())
        print(line)
        if self.log_file is not None:
            with open(self.log_file, "a") as f:
                f.write(line + "\n")

    def report_lines(self, lines):
        for line in lines:
            print(line)

    def fail(self, error):
        # "error: <kind>: <detail>" on the diagnostic stream
        print(f"error: {error.kind}: {error}", file=sys.stderr)
        if self.error_file is not None:
            self.log("ERROR:", error.kind, str(error), log_type="error")
        return error.exit_code

    def handle_exception(self, exc_type, exc_value, exc_traceback):
        if exc_type is not KeyboardInterrupt:  # Don't log keyboard interrupt
            self.error("An unhandled exception occurred:")
            self.log("\n".join(
                traceback.format_exception(exc_type, exc_value, exc_traceback)), log_type="error")

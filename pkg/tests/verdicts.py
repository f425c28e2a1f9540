"""Pass/fail lines for the acceptance criteria, shared with the terminal summary."""

import contextlib

VERDICTS: dict[int, tuple[bool, str]] = {}


@contextlib.contextmanager
def criterion(n: int, text: str):
    try:
        yield
    except BaseException:
        VERDICTS[n] = (False, text)
        print(f"criterion {n}: FAIL  {text}")
        raise
    VERDICTS[n] = (True, text)
    print(f"criterion {n}: PASS  {text}")

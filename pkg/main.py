import logging
import sys

from dotenv import load_dotenv
from fastmcp import FastMCP

from src.common.settings import Settings
from src.core.study import cli
from src.core.tools.tools import continuation_mcp


load_dotenv()
settings = Settings.from_env()
logging.basicConfig(level=settings.log_level, stream=sys.stderr)

mcp = FastMCP("FC-Gram Bot")
mcp.mount(continuation_mcp, prefix="fcgram")


if __name__ == "__main__":
    # `python main.py serve` runs the MCP server; every other subcommand is a study
    sys.exit(cli.main(sys.argv[1:], serve=mcp.run, settings=settings))

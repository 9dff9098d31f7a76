import logging
import sys

from utils import config, data

try:
    config = config.Config.from_env(".env")
except FileNotFoundError:
    config = config.Config()

logging.basicConfig(
    level=getattr(logging, str(config.quiverlab_log_level).upper(), logging.INFO),
    filename=config.quiverlab_log_file or None,
    format="%(asctime)s %(levelname)s %(name)s: %(message)s",
)

app = data.LabApp(config=config)

if __name__ == "__main__":
    try:
        sys.exit(app.run(sys.argv[1:]))
    except Exception as e:
        print(f"Error when running the lab: {e}")
        sys.exit(3)

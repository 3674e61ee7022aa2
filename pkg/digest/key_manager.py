import os
import base64
import hashlib


KEY_FILE = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'digest.key')


def derive_key(text: str, size: int = 32) -> bytes:
    """
    由任意字符串（例如会话种子）确定性地派生密钥
    :param text: 输入字符串
    :param size: 密钥字节数，最大32(SHA-256)
    :return: 密钥
    """
    if size > 32:
        raise ValueError("最大支持32字节(SHA-256)")
    return hashlib.sha256(text.encode('utf-8')).digest()[:size]


def key_to_seed(key: bytes) -> int:
    """把密钥折叠成 numpy 随机数发生器可用的 64 位种子"""
    return int.from_bytes(hashlib.sha256(key).digest()[:8], 'big')


def generate_and_save_key(key_file=KEY_FILE, size=32):
    """生成并保存公共摘要密钥到文件（V 与 Eve 事先约定）"""
    if os.path.exists(key_file):
        raise FileExistsError(f"密钥文件已存在，请勿重复生成: {key_file}")

    key = os.urandom(size)
    with open(key_file, 'wb') as f:
        f.write(base64.b64encode(key))
    print(f"🔑 新密钥已生成并保存到 {key_file}")
    return key


def load_key(key_file=KEY_FILE):
    """从文件加载摘要密钥"""
    if not os.path.exists(key_file):
        raise FileNotFoundError(f"未找到密钥文件，请先生成密钥: {key_file}")

    with open(key_file, 'rb') as f:
        return base64.b64decode(f.read())

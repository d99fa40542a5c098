# src パッケージ初期化